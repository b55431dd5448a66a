module.exports = function(RED) {
    function HalfListenerNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            node.log('input received');
        });
    }
    RED.nodes.registerType('half-listener', HalfListenerNode);
};

module.exports = function(RED) {
    function InputStatusNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            node.status({ fill: 'blue', shape: 'dot', text: msg.payload });
        });
    }
    RED.nodes.registerType('input-status', InputStatusNode);
};

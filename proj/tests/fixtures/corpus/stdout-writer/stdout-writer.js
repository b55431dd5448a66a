module.exports = function(RED) {
    function StdoutWriterNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            process.stdout.write(msg.payload);
        });
    }
    RED.nodes.registerType('stdout-writer', StdoutWriterNode);
};

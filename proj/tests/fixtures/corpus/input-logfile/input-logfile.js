module.exports = function(RED) {
    var fs = require('fs');
    function InputLogfileNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            fs.writeFile(config.path, msg.payload, function(err) {
                if (err) {
                    node.warn(err);
                }
            });
        });
    }
    RED.nodes.registerType('input-logfile', InputLogfileNode);
};

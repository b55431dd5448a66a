module.exports = function(RED) {
    var fs = require('fs');
    function AuditAppendNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            fs.appendFile(config.path, msg.topic + '\n', function(err) {});
        });
    }
    RED.nodes.registerType('audit-append', AuditAppendNode);
};

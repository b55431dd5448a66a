module.exports = function(RED) {
    var fs = require('fs');
    function FileReaderNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            var data = fs.readFileSync(msg.filename);
            node.send([{ payload: data }]);
        });
    }
    RED.nodes.registerType('file-reader', FileReaderNode);
};

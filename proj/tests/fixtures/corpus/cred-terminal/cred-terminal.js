module.exports = function(RED) {
    function CredTerminalNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            console.log(node.credentials.password);
        });
    }
    RED.nodes.registerType('cred-terminal', CredTerminalNode, {
        credentials: { password: { type: 'password' } }
    });
};

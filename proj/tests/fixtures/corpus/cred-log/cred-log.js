module.exports = function(RED) {
    function CredLogNode(config) {
        RED.nodes.createNode(this, config);
        this.log(this.credentials.apiKey);
    }
    RED.nodes.registerType('cred-log', CredLogNode, {
        credentials: { apiKey: { type: 'text' } }
    });
};

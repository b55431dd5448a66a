module.exports = function(RED) {
    function EnvGlobalNode(config) {
        RED.nodes.createNode(this, config);
        var global = this.context().global;
        global.set('apiHost', process.env.API_HOST);
    }
    RED.nodes.registerType('env-global', EnvGlobalNode);
};

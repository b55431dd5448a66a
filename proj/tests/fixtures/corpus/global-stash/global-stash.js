module.exports = function(RED) {
    function GlobalStashNode(config) {
        RED.nodes.createNode(this, config);
        var global = this.context().global;
        var context = this.context();
        var snapshot = global.get('settings');
        context.set('mirror', snapshot);
    }
    RED.nodes.registerType('global-stash', GlobalStashNode);
};

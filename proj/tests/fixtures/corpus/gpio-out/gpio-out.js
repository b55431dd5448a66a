module.exports = function(RED) {
    var gpio = require('rpi-gpio');
    function GpioOutNode(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on('input', function(msg) {
            gpio.write(config.pin, msg.payload);
        });
    }
    RED.nodes.registerType('gpio-out', GpioOutNode);
};

module.exports = {
    tidy: function(m) {
        delete m.internal;
        return m;
    }
};

// Recording stubs for the imported page libraries used by the demo page.
// Mirrors the reference interpreter's stub host: methods chain on the
// receiver, `is` answers true, object invocation fabricates a fresh bag.
'use strict';

function makeElement(record) {
  var el = {
    attr: function () { record.push(['attr']); return el; },
    append: function () { record.push(['append']); return el; },
    is: function () { record.push(['is']); return true; },
    click: function () { record.push(['click']); return el; }
  };
  return el;
}

function makeStubs() {
  var record = [];
  return {
    record: record,
    jQuery: function (command) {
      record.push(['jQuery', command]);
      return makeElement(record);
    },
    HighchartsOptions: function () { record.push(['HighchartsOptions']); return {}; },
    HighchartsChartOptions: function () { record.push(['HighchartsChartOptions']); return {}; },
    HighchartsTitleOptions: function () { record.push(['HighchartsTitleOptions']); return {}; },
    HighchartsSeriesOptions: function (data, name) {
      record.push(['HighchartsSeriesOptions', name]);
      return { data: data, name: name };
    }
  };
}

if (typeof module !== 'undefined' && module.exports) {
  module.exports = { makeStubs: makeStubs };
}

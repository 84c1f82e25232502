// compiled module; requires runtime shim: mmlrt.js (global MMLRT)
"use strict";
var jQuery$ = (function (command) { return jQuery(command); });
var data = (null);
var countries = MMLRT.cons(["European Union", MMLRT.GetCountry(MMLRT.GetCountries(data), "EUU")], MMLRT.cons(["Czech Republic", MMLRT.GetCountry(MMLRT.GetCountries(data), "CZE")], MMLRT.cons(["United Kingdom", MMLRT.GetCountry(MMLRT.GetCountries(data), "GBR")], MMLRT.cons(["United States", MMLRT.GetCountry(MMLRT.GetCountries(data), "USA")], MMLRT.nil))));
var infos = MMLRT.list_map((function (__p1) { var __t2 = __p1; var name = __t2[0]; var country = __t2[1]; return (function () { var check = jQuery$("<input>").attr("type", "checkbox"); return (jQuery$("#panel").append(check).append(name), [name, (country), check]); }()); }), countries);
var render = (function () { return MMLRT.async_delay((function () { return (function () { var head = "School enrollment, tertiary (% gross)"; return (function () { var o = HighchartsOptions(); return ((o.chart = HighchartsChartOptions("plc"), null), ((o.title = HighchartsTitleOptions(head), null), ((o.series = [], null), (function () { var picked = []; return MMLRT.async_bind(MMLRT.async_for(infos, (function (__p3) { var __t4 = __p3; var name = __t4[0]; var ind = __t4[1]; var check = __t4[2]; return MMLRT.async_bind(((check.is(":checked")) ? MMLRT.async_bind(MMLRT.AsyncGetIndicator(ind, "SE.TER.ENRR"), (function (values) { return (function () { var points = MMLRT.array_ofSeq(MMLRT.seq_map((function (__p5) { var __t6 = __p5; var k = __t6[0]; var v = __t6[1]; return [(k*1.0), (v*1.0)]; }), values)); return (o.series.push(HighchartsSeriesOptions(points, name)), (picked.push([name, values]), MMLRT.async_return(null))); }()); })) : MMLRT.async_return(null)), (function () { return MMLRT.async_return(null); })); })), (function () { return MMLRT.async_return(picked); })); }())))); }()); }()); })); });
var handlers = (function () { var __s = infos; for (var __c9 = __s; __c9 !== MMLRT.nil; __c9 = __c9.t) { var __x7 = __c9.h; var __t8 = __x7; var name = __t8[0]; var ind = __t8[1]; var check = __t8[2]; check.click((function (e) { return MMLRT.async_startImmediate(render(null)); })); } return null; }());
var __entry = render(null);

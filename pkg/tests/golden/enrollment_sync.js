// compiled module; requires runtime shim: mmlrt.js (global MMLRT)
"use strict";
var data = (null);
var picked = MMLRT.cons(["Czech Republic", MMLRT.GetCountry(MMLRT.GetCountries(data), "CZE")], MMLRT.cons(["United States", MMLRT.GetCountry(MMLRT.GetCountries(data), "USA")], MMLRT.nil));
var __entry = MMLRT.list_map((function (__p1) { var __t2 = __p1; var label = __t2[0]; var country = __t2[1]; return [label, MMLRT.GetIndicator((country), "SE.TER.ENRR")]; }), picked);

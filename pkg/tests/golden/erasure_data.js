// compiled module; requires runtime shim: mmlrt.js (global MMLRT)
"use strict";
var data = (null);
var cz = MMLRT.GetCountry(MMLRT.GetCountries(data), "CZE");
var ind = (cz);
var __entry = MMLRT.AsyncGetIndicator(ind, "SE.TER.ENRR");

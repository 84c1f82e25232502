// Runtime shim backing compiled modules. Dependency-free ES5; runs in any
// engine. Exports exactly the closed symbol table the compiler targets.
//
// Configuration comes from optional globals:
//   MMLRT_WORLD_DATA  inline world fixture object ({countries, indicators, values})
//   MMLRT_WORLD_URL   base URL of a fixture server (GET /world/values?...)
//   MMLRT_ON_ERROR    hook receiving uncaught async errors
var MMLRT = (function () {
  'use strict';

  // ---------------------------------------------------------------- lists
  var nil = { nil: true };

  function cons(h, t) {
    return { h: h, t: t };
  }

  function toArray(xs) {
    if (Object.prototype.toString.call(xs) === '[object Array]') {
      return xs.slice();
    }
    var out = [];
    for (var c = xs; c !== nil; c = c.t) {
      out.push(c.h);
    }
    return out;
  }

  function ofArray(items) {
    var out = nil;
    for (var i = items.length - 1; i >= 0; i--) {
      out = cons(items[i], out);
    }
    return out;
  }

  function list_map(f, xs) {
    var items = toArray(xs);
    var mapped = [];
    for (var i = 0; i < items.length; i++) {
      mapped.push(f(items[i]));
    }
    return ofArray(mapped);
  }

  function seq_map(f, xs) {
    return list_map(f, xs);
  }

  function array_ofSeq(xs) {
    return toArray(xs);
  }

  // ----------------------------------------------------------- trampoline
  // Continuations go through a FIFO queue; a continuation never runs inside
  // another's frame (pushes during a drain wait for their turn).
  var queue = [];
  var running = false;

  function schedule(job) {
    queue.push(job);
    if (!running) {
      running = true;
      try {
        while (queue.length) {
          queue.shift()();
        }
      } finally {
        running = false;
      }
    }
  }

  // an async value is { cont: function (onSuccess, onError) }
  function async_return(v) {
    return {
      cont: function (ok) {
        ok(v);
      }
    };
  }

  function async_delay(f) {
    return {
      cont: function (ok, err) {
        var inner;
        try {
          inner = f(null);
        } catch (e) {
          err(e);
          return;
        }
        inner.cont(ok, err);
      }
    };
  }

  function async_bind(m, f) {
    return {
      cont: function (ok, err) {
        // entering through the queue keeps left-nested chains iterative
        schedule(function () {
          m.cont(function (v) {
            schedule(function () {
              var next;
              try {
                next = f(v);
              } catch (e) {
                err(e);
                return;
              }
              next.cont(ok, err);
            });
          }, err);
        });
      }
    };
  }

  function async_for(xs, f) {
    var items = toArray(xs);
    return {
      cont: function (ok, err) {
        var i = 0;
        function step() {
          if (i >= items.length) {
            ok(null);
            return;
          }
          var inner;
          try {
            inner = f(items[i]);
          } catch (e) {
            err(e);
            return;
          }
          i++;
          inner.cont(function () {
            schedule(step);
          }, err);
        }
        step();
      }
    };
  }

  function async_catch(m, handler) {
    return {
      cont: function (ok, err) {
        m.cont(ok, function (e) {
          var next;
          try {
            next = handler(e);
          } catch (e2) {
            err(e2);
            return;
          }
          next.cont(ok, err);
        });
      }
    };
  }

  function async_startImmediate(m) {
    schedule(function () {
      m.cont(function () {}, function (e) {
        if (typeof MMLRT_ON_ERROR === 'function') {
          MMLRT_ON_ERROR(e);
        } else {
          throw e;
        }
      });
    });
    return null;
  }

  // ---------------------------------------------------------- world access
  function missingKey(country, indicator) {
    return {
      mmlFailure: 'missing-key',
      country: country,
      indicator: indicator,
      message: 'no data for (' + country + ', ' + indicator + ')'
    };
  }

  function inlineWorld() {
    return typeof MMLRT_WORLD_DATA !== 'undefined' ? MMLRT_WORLD_DATA : null;
  }

  function worldUrl() {
    return typeof MMLRT_WORLD_URL !== 'undefined' ? MMLRT_WORLD_URL : null;
  }

  function inlineSeries(country, indicator) {
    var world = inlineWorld();
    if (!world) {
      return undefined;
    }
    for (var i = 0; i < world.values.length; i++) {
      var row = world.values[i];
      if (row.country === country && row.indicator === indicator) {
        return row.series;
      }
    }
    return null; // world present, pair absent
  }

  function seriesToList(series) {
    var points = [];
    for (var i = 0; i < series.length; i++) {
      points.push([series[i][0], series[i][1]]);
    }
    return ofArray(points);
  }

  function httpGetJson(url, k, kerr) {
    if (typeof XMLHttpRequest !== 'undefined') {
      var xhr = new XMLHttpRequest();
      xhr.open('GET', url, true);
      xhr.onreadystatechange = function () {
        if (xhr.readyState !== 4) {
          return;
        }
        if (xhr.status === 200) {
          k(JSON.parse(xhr.responseText));
        } else {
          kerr(xhr.status);
        }
      };
      xhr.send();
      return;
    }
    if (typeof require !== 'undefined') {
      var http = require('http');
      http.get(url, function (res) {
        var body = '';
        res.on('data', function (chunk) {
          body += chunk;
        });
        res.on('end', function () {
          if (res.statusCode === 200) {
            k(JSON.parse(body));
          } else {
            kerr(res.statusCode);
          }
        });
      }).on('error', function () {
        kerr(0);
      });
      return;
    }
    kerr(0);
  }

  function fetchSeries(country, indicator, k, kerr) {
    var inline = inlineSeries(country, indicator);
    if (inline !== undefined) {
      schedule(function () {
        if (inline === null) {
          kerr(missingKey(country, indicator));
        } else {
          k(seriesToList(inline));
        }
      });
      return;
    }
    var base = worldUrl();
    if (!base) {
      schedule(function () {
        kerr({ mmlFailure: 'no-world', message: 'no world data or server configured' });
      });
      return;
    }
    var url = base + '/world/values?country=' + encodeURIComponent(country) +
      '&indicator=' + encodeURIComponent(indicator);
    httpGetJson(url, function (series) {
      schedule(function () {
        k(seriesToList(series));
      });
    }, function (status) {
      schedule(function () {
        kerr(missingKey(country, indicator));
      });
    });
  }

  function GetCountries(ctx) {
    return {};
  }

  function GetCountry(handle, code) {
    return { code: code };
  }

  function GetIndicator(handle, code) {
    var inline = inlineSeries(handle.code, code);
    if (inline === undefined) {
      throw { mmlFailure: 'no-world', message: 'synchronous access needs MMLRT_WORLD_DATA' };
    }
    if (inline === null) {
      throw missingKey(handle.code, code);
    }
    return seriesToList(inline);
  }

  function GetIndicatorOpt(handle, code, isAsync) {
    if (isAsync) {
      return {
        cont: function (ok) {
          var inline = inlineSeries(handle.code, code);
          if (inline !== undefined) {
            schedule(function () {
              ok(inline === null ? null : seriesToList(inline));
            });
            return;
          }
          fetchSeries(handle.code, code, ok, function () {
            ok(null);
          });
        }
      };
    }
    var inline = inlineSeries(handle.code, code);
    if (inline === undefined) {
      throw { mmlFailure: 'no-world', message: 'synchronous access needs MMLRT_WORLD_DATA' };
    }
    return inline === null ? null : seriesToList(inline);
  }

  function AsyncGetIndicator(handle, code) {
    return {
      cont: function (ok, err) {
        fetchSeries(handle.code, code, ok, err);
      }
    };
  }

  // -------------------------------------------------------------- casting
  function unbox_check(v, tag) {
    var t = typeof v;
    var ok =
      (tag === 'bool' && t === 'boolean') ||
      (tag === 'int' && t === 'number' && (v | 0) === v) ||
      (tag === 'float' && t === 'number') ||
      (tag === 'string' && t === 'string');
    if (!ok) {
      throw { mmlFailure: 'cast', message: 'dynamic value does not match ' + tag };
    }
    return v;
  }

  return {
    cons: cons,
    nil: nil,
    list_map: list_map,
    seq_map: seq_map,
    array_ofSeq: array_ofSeq,
    async_bind: async_bind,
    async_return: async_return,
    async_delay: async_delay,
    async_for: async_for,
    async_startImmediate: async_startImmediate,
    async_catch: async_catch,
    GetCountries: GetCountries,
    GetCountry: GetCountry,
    GetIndicator: GetIndicator,
    GetIndicatorOpt: GetIndicatorOpt,
    AsyncGetIndicator: AsyncGetIndicator,
    unbox_check: unbox_check
  };
})();

if (typeof module !== 'undefined' && module.exports) {
  module.exports = MMLRT;
}

#!/usr/bin/env node
// Executes compiled modules against mmlrt.js and prints canonical JSON.
//
// Single mode:  node runner.js program.js [world.json] [--server URL]
// Batch mode:   node runner.js --batch manifest.json
//   manifest: {"items": [{"file": "p.js", "world": {...}|null}, ...]}
//   output: one JSON line per item: {"ok": true, "value": ...} or
//   {"ok": false, "error": "..."}
'use strict';

const fs = require('fs');
const MMLRT = require('./mmlrt.js');
const { makeStubs } = require('./stubs.js');

function canonical(v) {
  if (v === null || v === undefined) return null;
  if (typeof v === 'number' || typeof v === 'string' || typeof v === 'boolean') return v;
  if (Array.isArray(v)) return v.map(canonical);
  if (v === MMLRT.nil) return [];
  if (typeof v === 'object' && 'h' in v && 't' in v) {
    const out = [];
    for (let c = v; c !== MMLRT.nil; c = c.t) out.push(canonical(c.h));
    return out;
  }
  throw new Error('value has no canonical JSON form: ' + Object.prototype.toString.call(v));
}

function runEntry(entry, cb) {
  if (entry && typeof entry === 'object' && typeof entry.cont === 'function') {
    let settled = false;
    entry.cont(
      v => { if (!settled) { settled = true; cb(null, v); } },
      e => { if (!settled) { settled = true; cb(e); } }
    );
    return;
  }
  cb(null, entry);
}

// World configuration travels through real globals: the shim feature-detects
// them from its own scope. One program runs at a time.
function execProgram(source, world, serverUrl, cb) {
  const stubs = makeStubs();
  if (world) global.MMLRT_WORLD_DATA = world; else delete global.MMLRT_WORLD_DATA;
  if (serverUrl) global.MMLRT_WORLD_URL = serverUrl; else delete global.MMLRT_WORLD_URL;
  const fn = new Function(
    'MMLRT',
    'jQuery', 'HighchartsOptions', 'HighchartsChartOptions',
    'HighchartsTitleOptions', 'HighchartsSeriesOptions',
    source + '\nreturn typeof __entry === "undefined" ? null : __entry;'
  );
  let entry;
  try {
    entry = fn(
      MMLRT,
      stubs.jQuery, stubs.HighchartsOptions, stubs.HighchartsChartOptions,
      stubs.HighchartsTitleOptions, stubs.HighchartsSeriesOptions
    );
  } catch (e) {
    cb(e);
    return;
  }
  runEntry(entry, (err, value) => {
    if (err) { cb(err); return; }
    try {
      cb(null, canonical(value));
    } catch (e) {
      cb(e);
    }
  });
}

function describeError(e) {
  if (e && e.mmlFailure) return e.mmlFailure + ': ' + e.message;
  return String(e && e.message ? e.message : e);
}

function main() {
  const args = process.argv.slice(2);
  if (args[0] === '--batch') {
    const manifest = JSON.parse(fs.readFileSync(args[1], 'utf8'));
    const items = manifest.items;
    const results = [];
    function next(i) {
      if (i >= items.length) {
        for (const r of results) console.log(JSON.stringify(r));
        return;
      }
      const item = items[i];
      const source = fs.readFileSync(item.file, 'utf8');
      execProgram(source, item.world || null, item.server || null, (err, value) => {
        results.push(err ? { ok: false, error: describeError(err) } : { ok: true, value });
        next(i + 1);
      });
    }
    next(0);
    return;
  }
  const file = args[0];
  let world = null;
  let serverUrl = null;
  for (let i = 1; i < args.length; i++) {
    if (args[i] === '--server') serverUrl = args[++i];
    else world = JSON.parse(fs.readFileSync(args[i], 'utf8'));
  }
  const source = fs.readFileSync(file, 'utf8');
  execProgram(source, world, serverUrl, (err, value) => {
    if (err) {
      console.error(describeError(err));
      process.exit(2);
    }
    console.log(JSON.stringify(value));
  });
}

main();

import { describe, it, expect } from 'vitest';
import MMLRT from '../mmlrt.js';

function ofArray(items) {
  let out = MMLRT.nil;
  for (let i = items.length - 1; i >= 0; i--) out = MMLRT.cons(items[i], out);
  return out;
}

function toArray(xs) {
  const out = [];
  for (let c = xs; c !== MMLRT.nil; c = c.t) out.push(c.h);
  return out;
}

describe('list operations', () => {
  it('cons cells are plain two-field nodes with a singleton nil', () => {
    const cell = MMLRT.cons(1, MMLRT.nil);
    expect(cell.h).toBe(1);
    expect(cell.t).toBe(MMLRT.nil);
  });

  it('list_map agrees with array map for random inputs', () => {
    let seed = 42;
    const rand = () => (seed = (seed * 1103515245 + 12345) & 0x7fffffff) % 100;
    for (let trial = 0; trial < 50; trial++) {
      const n = rand() % 8;
      const items = [];
      for (let i = 0; i < n; i++) items.push(rand());
      const f = x => x * 2 + 1;
      const viaList = toArray(MMLRT.list_map(f, ofArray(items)));
      expect(viaList).toEqual(items.map(f));
    }
  });

  it('seq_map accepts arrays as sequences', () => {
    expect(toArray(MMLRT.seq_map(x => x + 1, [1, 2, 3]))).toEqual([2, 3, 4]);
  });

  it('array_ofSeq converts lists to arrays', () => {
    expect(MMLRT.array_ofSeq(ofArray([4, 5]))).toEqual([4, 5]);
  });

  it('unbox_check validates dynamic tags', () => {
    expect(MMLRT.unbox_check(true, 'bool')).toBe(true);
    expect(MMLRT.unbox_check(3, 'int')).toBe(3);
    expect(() => MMLRT.unbox_check('x', 'bool')).toThrow();
  });
});

import { describe, expect, it } from "vitest";
import { BoundaryDraft, BoundaryDraftError } from "../src/editor/boundary.js";

function rectangle(): BoundaryDraft {
  const d = new BoundaryDraft(256);
  d.addPoint([20, 20]);
  d.addPoint([200, 20]);
  d.addPoint([200, 180]);
  d.addPoint([20, 180]);
  d.close();
  return d;
}

describe("BoundaryDraft", () => {
  it("snaps every new point onto an axis of the previous one", () => {
    const d = new BoundaryDraft(256);
    d.addPoint([20, 20]);
    const p = d.addPoint([117, 26]);
    expect(p).toEqual([117, 20]);
    const q = d.addPoint([113, 90]);
    expect(q).toEqual([117, 90]);
  });

  it("clamps points to the canvas and rounds to integers", () => {
    const d = new BoundaryDraft(256);
    const p = d.addPoint([-14.3, 300.7]);
    expect(p).toEqual([0, 256]);
  });

  it("produces rectilinear outlines after closing", () => {
    const d = new BoundaryDraft(256);
    d.addPoint([20, 20]);
    d.addPoint([200, 23]);
    d.addPoint([198, 120]);
    d.addPoint([120, 118]);
    d.addPoint([121, 180]);
    d.close();
    const v = d.vertices;
    expect(v.length).toBeGreaterThanOrEqual(4);
    for (let i = 0; i < v.length; i++) {
      const a = v[i];
      const b = v[(i + 1) % v.length];
      expect(a[0] === b[0] || a[1] === b[1]).toBe(true);
    }
  });

  it("drops collinear vertices introduced while closing", () => {
    const d = new BoundaryDraft(256);
    d.addPoint([30, 30]);
    d.addPoint([220, 30]);
    d.addPoint([220, 150]);
    d.addPoint([28, 150]);
    d.close();
    const v = d.vertices;
    const n = v.length;
    for (let i = 0; i < n; i++) {
      const prev = v[(i - 1 + n) % n];
      const cur = v[i];
      const next = v[(i + 1) % n];
      expect((cur[1] === prev[1]) !== (next[1] === cur[1])).toBe(true);
    }
  });

  it("refuses to close with fewer than three vertices", () => {
    const d = new BoundaryDraft(256);
    d.addPoint([10, 10]);
    d.addPoint([50, 10]);
    expect(() => d.close()).toThrow(BoundaryDraftError);
  });

  it("rejects degenerate zero-length segments", () => {
    const d = new BoundaryDraft(256);
    d.addPoint([10, 10]);
    expect(() => d.addPoint([10, 10])).toThrow(BoundaryDraftError);
  });

  it("places the door on the nearest edge with the configured width", () => {
    const d = rectangle();
    const [p0, p1] = d.placeDoor([100, 10]);
    expect(p0[1]).toBe(20);
    expect(p1[1]).toBe(20);
    expect(Math.abs(p1[0] - p0[0])).toBeCloseTo(4, 9);
    expect((p0[0] + p1[0]) / 2).toBeCloseTo(100, 9);
  });

  it("keeps the door inside the edge when clicked near a corner", () => {
    const d = rectangle();
    const [p0, p1] = d.placeDoor([19, 19]);
    for (const p of [p0, p1]) {
      expect(p[0]).toBeGreaterThanOrEqual(20);
      expect(p[0]).toBeLessThanOrEqual(200);
      expect(p[1]).toBe(20);
    }
  });

  it("emits the service wire format only when closed with a door", () => {
    const d = rectangle();
    expect(() => d.toBoundary()).toThrow(BoundaryDraftError);
    d.placeDoor([100, 20]);
    const b = d.toBoundary();
    expect(b.resolution).toBe(256);
    expect(b.vertices.length).toBe(4);
    expect(b.door.length).toBe(2);
  });

  it("undo reopens a closed outline and drops the door", () => {
    const d = rectangle();
    d.placeDoor([100, 20]);
    d.undo();
    expect(d.isClosed).toBe(false);
    expect(d.hasDoor).toBe(false);
    expect(d.vertices.length).toBe(4);
    d.undo();
    expect(d.vertices.length).toBe(3);
  });
});

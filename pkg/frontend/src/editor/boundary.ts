/** Interactive rectilinear boundary drafting.
 *
 * The draft accumulates clicked points, snapping each new point onto the
 * horizontal or vertical axis of the previous one, so the outline is
 * rectilinear by construction. Once closed, a door is placed by snapping
 * an arbitrary point onto the nearest outline edge.
 */

import { Boundary, Point } from "../api/types.js";

export class BoundaryDraftError extends Error {}

const MIN_SEGMENT = 1e-9;

function segmentLength(a: Point, b: Point): number {
  return Math.abs(b[0] - a[0]) + Math.abs(b[1] - a[1]);
}

/** Project p onto the axis-aligned segment a-b; returns [point, distance]. */
function projectOntoSegment(p: Point, a: Point, b: Point): [Point, number] {
  const ax = a[0];
  const ay = a[1];
  const dx = b[0] - ax;
  const dy = b[1] - ay;
  const len2 = dx * dx + dy * dy;
  let t = len2 === 0 ? 0 : ((p[0] - ax) * dx + (p[1] - ay) * dy) / len2;
  t = Math.max(0, Math.min(1, t));
  const q: Point = [ax + t * dx, ay + t * dy];
  const ex = p[0] - q[0];
  const ey = p[1] - q[1];
  return [q, Math.hypot(ex, ey)];
}

/** Drop vertices whose two incident axis-aligned edges share a direction. */
function pruneCollinear(points: Point[]): Point[] {
  const n = points.length;
  const kept: Point[] = [];
  for (let i = 0; i < n; i++) {
    const prev = points[(i - 1 + n) % n];
    const cur = points[i];
    const next = points[(i + 1) % n];
    const inHoriz = cur[1] === prev[1];
    const outHoriz = next[1] === cur[1];
    if (inHoriz !== outHoriz) {
      kept.push(cur);
    }
  }
  return kept;
}

export class BoundaryDraft {
  private points: Point[] = [];
  private closed = false;
  private door: [Point, Point] | null = null;

  constructor(
    public readonly resolution: number = 256,
    public readonly doorWidth: number = 4,
  ) {}

  get vertices(): Point[] {
    return this.points.map((p) => [p[0], p[1]]);
  }

  get isClosed(): boolean {
    return this.closed;
  }

  get hasDoor(): boolean {
    return this.door !== null;
  }

  /** Snap a raw cursor point onto the axis of the previous vertex. */
  snap(p: Point): Point {
    const x = Math.max(0, Math.min(this.resolution, Math.round(p[0])));
    const y = Math.max(0, Math.min(this.resolution, Math.round(p[1])));
    if (this.points.length === 0) return [x, y];
    const prev = this.points[this.points.length - 1];
    if (Math.abs(x - prev[0]) >= Math.abs(y - prev[1])) {
      return [x, prev[1]];
    }
    return [prev[0], y];
  }

  addPoint(raw: Point): Point {
    if (this.closed) {
      throw new BoundaryDraftError("outline is already closed");
    }
    const p = this.snap(raw);
    const prev = this.points[this.points.length - 1];
    if (prev && segmentLength(prev, p) < MIN_SEGMENT) {
      throw new BoundaryDraftError("degenerate segment");
    }
    this.points.push(p);
    return p;
  }

  /** Close the outline back to the first vertex, inserting a corner if
   * the last vertex does not share an axis with the first. */
  close(): void {
    if (this.closed) return;
    if (this.points.length < 3) {
      throw new BoundaryDraftError("need at least three vertices to close");
    }
    const first = this.points[0];
    const last = this.points[this.points.length - 1];
    if (last[0] !== first[0] && last[1] !== first[1]) {
      this.points.push([last[0], first[1]]);
    }
    const again = this.points[this.points.length - 1];
    if (segmentLength(again, first) < MIN_SEGMENT) {
      this.points.pop();
    }
    this.points = pruneCollinear(this.points);
    if (this.points.length < 4) {
      throw new BoundaryDraftError("outline collapsed while closing");
    }
    this.closed = true;
  }

  undo(): void {
    if (this.closed) {
      this.closed = false;
      this.door = null;
      return;
    }
    this.points.pop();
  }

  /** Place the entry door on the outline edge nearest to p. */
  placeDoor(p: Point): [Point, Point] {
    if (!this.closed) {
      throw new BoundaryDraftError("close the outline before placing a door");
    }
    let best: { q: Point; d: number; a: Point; b: Point } | null = null;
    const n = this.points.length;
    for (let i = 0; i < n; i++) {
      const a = this.points[i];
      const b = this.points[(i + 1) % n];
      const [q, d] = projectOntoSegment(p, a, b);
      if (best === null || d < best.d) {
        best = { q, d, a, b };
      }
    }
    if (best === null) {
      throw new BoundaryDraftError("outline has no edges");
    }
    const { q, a, b } = best;
    const len = segmentLength(a, b);
    const half = Math.min(this.doorWidth / 2, len / 2);
    const ux = (b[0] - a[0]) / len;
    const uy = (b[1] - a[1]) / len;
    let t0 = (q[0] - a[0]) * ux + (q[1] - a[1]) * uy;
    t0 = Math.max(half, Math.min(len - half, t0));
    const p0: Point = [a[0] + (t0 - half) * ux, a[1] + (t0 - half) * uy];
    const p1: Point = [a[0] + (t0 + half) * ux, a[1] + (t0 + half) * uy];
    this.door = [p0, p1];
    return this.door;
  }

  /** Emit the boundary in the service wire format. */
  toBoundary(): Boundary {
    if (!this.closed) {
      throw new BoundaryDraftError("outline is not closed");
    }
    if (this.door === null) {
      throw new BoundaryDraftError("no door placed");
    }
    return {
      vertices: this.vertices,
      door: [this.door[0], this.door[1]],
      resolution: this.resolution,
    };
  }
}

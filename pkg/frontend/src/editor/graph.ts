/** Layout graph editing model.
 *
 * Holds the last graph returned by the server and turns UI gestures into
 * wire edit commands. The model never mutates its own copy of the graph;
 * callers apply the command through the API client and feed the server's
 * response back via setGraph, so the server stays authoritative.
 */

import { EditCommand, LayoutGraph, RoomNode } from "../api/types.js";

export const GRID_SIZE = 5;

export class GraphEditError extends Error {}

function clampCell(cell: [number, number]): [number, number] {
  const clamp = (v: number) =>
    Math.max(0, Math.min(GRID_SIZE - 1, Math.round(v)));
  return [clamp(cell[0]), clamp(cell[1])];
}

export class GraphEditor {
  private graph: LayoutGraph | null = null;

  setGraph(graph: LayoutGraph): void {
    this.graph = graph;
  }

  get current(): LayoutGraph {
    if (this.graph === null) {
      throw new GraphEditError("no graph loaded");
    }
    return this.graph;
  }

  node(nodeId: number): RoomNode {
    const found = this.current.nodes.find((n) => n.id === nodeId);
    if (found === undefined) {
      throw new GraphEditError(`no node ${nodeId}`);
    }
    return found;
  }

  hasEdge(a: number, b: number): boolean {
    return this.current.edges.some(
      (e) => (e[0] === a && e[1] === b) || (e[0] === b && e[1] === a),
    );
  }

  /** Drag gesture: node dropped at a fractional grid position. */
  moveNode(nodeId: number, cell: [number, number]): EditCommand {
    this.node(nodeId);
    return { op: "move_node", node_id: nodeId, cell: clampCell(cell) };
  }

  addNode(
    type: string,
    cell: [number, number],
    sizeRatio?: number,
  ): EditCommand {
    if (sizeRatio !== undefined && (!(sizeRatio > 0) || sizeRatio > 1)) {
      throw new GraphEditError("size_ratio must be in (0, 1]");
    }
    if (sizeRatio === undefined) {
      return { op: "add_node", type, cell: clampCell(cell) };
    }
    return { op: "add_node", type, cell: clampCell(cell), size_ratio: sizeRatio };
  }

  deleteNode(nodeId: number): EditCommand {
    this.node(nodeId);
    return { op: "delete_node", node_id: nodeId };
  }

  addEdge(a: number, b: number): EditCommand {
    if (a === b) {
      throw new GraphEditError("cannot connect a room to itself");
    }
    this.node(a);
    this.node(b);
    if (this.hasEdge(a, b)) {
      throw new GraphEditError(`rooms ${a} and ${b} are already adjacent`);
    }
    return { op: "add_edge", a, b };
  }

  deleteEdge(a: number, b: number): EditCommand {
    if (!this.hasEdge(a, b)) {
      throw new GraphEditError(`rooms ${a} and ${b} are not adjacent`);
    }
    return { op: "delete_edge", a, b };
  }
}

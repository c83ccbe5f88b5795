import { beforeEach, describe, expect, it } from "vitest";
import { GraphEditError, GraphEditor } from "../src/editor/graph.js";
import { LayoutGraph } from "../src/api/types.js";

const sample: LayoutGraph = {
  nodes: [
    { id: 0, type: "LivingRoom", cell: [2, 2], size_ratio: 0.4, size_bin: 7 },
    { id: 1, type: "Bedroom", cell: [0, 1], size_ratio: 0.25, size_bin: 5 },
    { id: 2, type: "Kitchen", cell: [4, 3], size_ratio: 0.15, size_bin: 3 },
  ],
  edges: [
    [0, 1, "left-of"],
    [0, 2, "right-of"],
  ],
};

describe("GraphEditor", () => {
  let editor: GraphEditor;

  beforeEach(() => {
    editor = new GraphEditor();
    editor.setGraph(sample);
  });

  it("requires a graph before any command", () => {
    expect(() => new GraphEditor().moveNode(0, [1, 1])).toThrow(GraphEditError);
  });

  it("clamps dragged positions onto the 5x5 grid", () => {
    expect(editor.moveNode(1, [6.7, -2])).toEqual({
      op: "move_node",
      node_id: 1,
      cell: [4, 0],
    });
    expect(editor.moveNode(1, [2.4, 3.6])).toEqual({
      op: "move_node",
      node_id: 1,
      cell: [2, 4],
    });
  });

  it("rejects moves of unknown nodes", () => {
    expect(() => editor.moveNode(9, [1, 1])).toThrow(GraphEditError);
  });

  it("builds add_node commands with an optional size ratio", () => {
    expect(editor.addNode("Bathroom", [1, 3])).toEqual({
      op: "add_node",
      type: "Bathroom",
      cell: [1, 3],
    });
    expect(editor.addNode("Bathroom", [1, 3], 0.08)).toEqual({
      op: "add_node",
      type: "Bathroom",
      cell: [1, 3],
      size_ratio: 0.08,
    });
    expect(() => editor.addNode("Bathroom", [1, 3], 0)).toThrow(GraphEditError);
    expect(() => editor.addNode("Bathroom", [1, 3], 1.5)).toThrow(GraphEditError);
  });

  it("treats adjacency as undirected when validating edges", () => {
    expect(editor.hasEdge(1, 0)).toBe(true);
    expect(() => editor.addEdge(1, 0)).toThrow(GraphEditError);
    expect(editor.addEdge(1, 2)).toEqual({ op: "add_edge", a: 1, b: 2 });
    expect(editor.deleteEdge(2, 0)).toEqual({ op: "delete_edge", a: 2, b: 0 });
    expect(() => editor.deleteEdge(1, 2)).toThrow(GraphEditError);
  });

  it("rejects self-loops", () => {
    expect(() => editor.addEdge(1, 1)).toThrow(GraphEditError);
  });

  it("never mutates its current graph; setGraph replaces it", () => {
    editor.moveNode(0, [0, 0]);
    expect(editor.node(0).cell).toEqual([2, 2]);
    editor.setGraph({
      nodes: [{ id: 0, type: "LivingRoom", cell: [0, 0], size_ratio: 0.4, size_bin: 7 }],
      edges: [],
    });
    expect(editor.node(0).cell).toEqual([0, 0]);
  });
});

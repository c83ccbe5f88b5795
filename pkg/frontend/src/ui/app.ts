/** Thin DOM wiring for the floorplan editor.
 *
 * All state lives in the server and the two editor models; this module
 * only translates pointer events into model calls and injects the SVG
 * returned by the service into the page verbatim.
 */

import { ApiClient, ApiError } from "../api/client.js";
import { Candidate, Constraints, LayoutGraph } from "../api/types.js";
import { BoundaryDraft } from "../editor/boundary.js";
import { GraphEditor } from "../editor/graph.js";

type Mode = "draw" | "door" | "edit";

export class App {
  private draft: BoundaryDraft;
  private editor = new GraphEditor();
  private sessionId: string | null = null;
  private candidates: Candidate[] = [];
  private mode: Mode = "draw";
  private dragging: number | null = null;

  constructor(
    private client: ApiClient,
    private root: HTMLElement,
    private resolution: number = 256,
  ) {
    this.draft = new BoundaryDraft(resolution);
    this.render();
  }

  private el(id: string): HTMLElement {
    const node = this.root.querySelector<HTMLElement>(`#${id}`);
    if (node === null) throw new Error(`missing element ${id}`);
    return node;
  }

  private render(): void {
    this.root.innerHTML = `
      <div class="toolbar">
        <button id="close-outline">Close outline</button>
        <button id="undo">Undo</button>
        <button id="retrieve">Find templates</button>
        <button id="generate">Generate</button>
        <button id="export-svg">Export SVG</button>
        <span id="status"></span>
      </div>
      <svg id="canvas" viewBox="0 0 ${this.resolution} ${this.resolution}"></svg>
      <div id="candidates"></div>
      <div id="plan"></div>
    `;
    this.el("canvas").addEventListener("pointerdown", (ev) =>
      this.onCanvasDown(ev as PointerEvent),
    );
    this.el("canvas").addEventListener("pointerup", (ev) =>
      this.onCanvasUp(ev as PointerEvent),
    );
    this.el("close-outline").addEventListener("click", () => {
      this.draft.close();
      this.mode = "door";
      this.setStatus("click an edge to place the entry door");
      this.drawOutline();
    });
    this.el("undo").addEventListener("click", () => {
      this.draft.undo();
      this.mode = this.draft.isClosed ? "door" : "draw";
      this.drawOutline();
    });
    this.el("retrieve").addEventListener("click", () => {
      void this.retrieve({});
    });
    this.el("generate").addEventListener("click", () => {
      void this.generate();
    });
    this.el("export-svg").addEventListener("click", () => {
      void this.exportSvg();
    });
  }

  private setStatus(text: string): void {
    this.el("status").textContent = text;
  }

  private canvasPoint(ev: PointerEvent): [number, number] {
    const svg = this.el("canvas") as unknown as SVGSVGElement;
    const rect = svg.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * this.resolution;
    const y = ((ev.clientY - rect.top) / rect.height) * this.resolution;
    return [x, y];
  }

  private onCanvasDown(ev: PointerEvent): void {
    const p = this.canvasPoint(ev);
    if (this.mode === "draw") {
      this.draft.addPoint(p);
      this.drawOutline();
    } else if (this.mode === "door") {
      this.draft.placeDoor(p);
      this.drawOutline();
      void this.openSession();
    } else {
      const target = ev.target as Element;
      const id = target.getAttribute("data-node");
      this.dragging = id === null ? null : Number(id);
    }
  }

  private onCanvasUp(ev: PointerEvent): void {
    if (this.mode !== "edit" || this.dragging === null) return;
    const nodeId = this.dragging;
    this.dragging = null;
    const p = this.canvasPoint(ev);
    const cell: [number, number] = [
      (p[0] / this.resolution) * 5 - 0.5,
      (p[1] / this.resolution) * 5 - 0.5,
    ];
    void this.applyEdit(() => this.editor.moveNode(nodeId, cell));
  }

  private drawOutline(): void {
    const svg = this.el("canvas");
    const pts = this.draft.vertices
      .map((v) => `${v[0]},${v[1]}`)
      .join(" ");
    const shape = this.draft.isClosed
      ? `<polygon points="${pts}" fill="#eef" stroke="#333"/>`
      : `<polyline points="${pts}" fill="none" stroke="#333"/>`;
    svg.innerHTML = shape + this.graphMarkup();
  }

  private graphMarkup(): string {
    let graph: LayoutGraph;
    try {
      graph = this.editor.current;
    } catch {
      return "";
    }
    const cellToXy = (c: [number, number]): [number, number] => [
      ((c[0] + 0.5) / 5) * this.resolution,
      ((c[1] + 0.5) / 5) * this.resolution,
    ];
    const byId = new Map(graph.nodes.map((n) => [n.id, n]));
    const edges = graph.edges
      .map(([a, b]) => {
        const na = byId.get(a);
        const nb = byId.get(b);
        if (!na || !nb) return "";
        const [x1, y1] = cellToXy(na.cell);
        const [x2, y2] = cellToXy(nb.cell);
        return `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" stroke="#999"/>`;
      })
      .join("");
    const nodes = graph.nodes
      .map((n) => {
        const [x, y] = cellToXy(n.cell);
        const r = 4 + 10 * Math.sqrt(n.size_ratio);
        return (
          `<circle data-node="${n.id}" cx="${x}" cy="${y}" r="${r}"` +
          ` fill="#8ac" stroke="#345"/>` +
          `<text x="${x}" y="${y}" font-size="6" text-anchor="middle">${n.type}</text>`
        );
      })
      .join("");
    return edges + nodes;
  }

  private async openSession(): Promise<void> {
    try {
      this.sessionId = await this.client.createSession(this.draft.toBoundary());
      this.setStatus("session ready; find templates to continue");
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  async retrieve(constraints: Constraints): Promise<void> {
    if (this.sessionId === null) return;
    try {
      this.candidates = await this.client.retrieve(this.sessionId, constraints, 10);
      const html = this.candidates
        .map(
          (c, i) =>
            `<pre class="candidate" data-index="${i}">` +
            `${c.record_id} d=${c.distance.toFixed(3)}\n` +
            c.thumbnail.join("\n") +
            `</pre>`,
        )
        .join("");
      const panel = this.el("candidates");
      panel.innerHTML = html;
      panel.querySelectorAll(".candidate").forEach((node) => {
        node.addEventListener("click", () => {
          const i = Number(node.getAttribute("data-index"));
          void this.pickCandidate(i);
        });
      });
      this.setStatus(`${this.candidates.length} templates found`);
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  private async pickCandidate(index: number): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const graph = await this.client.transfer(
        this.sessionId,
        this.candidates[index].record_id,
      );
      this.editor.setGraph(graph);
      this.mode = "edit";
      this.drawOutline();
      this.setStatus("drag rooms or generate");
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  private async applyEdit(build: () => import("../api/types.js").EditCommand) {
    if (this.sessionId === null) return;
    try {
      const graph = await this.client.edit(this.sessionId, build());
      this.editor.setGraph(graph);
      this.drawOutline();
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  async generate(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const result = await this.client.generate(this.sessionId);
      this.el("plan").innerHTML = result.svg;
      const s = result.stats;
      this.setStatus(
        `${s.n_rooms} rooms, coverage ${s.coverage.toFixed(3)}, ` +
          `${s.unsatisfied_adjacencies.length} unsatisfied adjacencies`,
      );
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  private async exportSvg(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const svg = await this.client.exportPlan(this.sessionId, "svg");
      const blob = new Blob([svg], { type: "image/svg+xml" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "floorplan.svg";
      a.click();
      URL.revokeObjectURL(a.href);
    } catch (err) {
      this.setStatus(this.describe(err));
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.code}: ${err.message}`;
    return String(err);
  }
}

export function mount(root: HTMLElement, baseUrl: string): App {
  return new App(new ApiClient(baseUrl), root);
}

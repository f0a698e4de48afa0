import { layoutGraph, LayoutOptions } from "./layout.js";
import { A2AEdge, A2AGraph, edgeKeyId, edgeKeyOf, LayoutControls, Metric } from "./types.js";

export interface RenderOptions extends LayoutControls {
  metric: Metric;
  selected: Set<string>; // edgeKeyId values
}

export function metricValue(edge: A2AEdge, metric: Metric): number {
  switch (metric) {
    case "count":
      return edge.count;
    case "weight":
      return edge.weight;
    case "perf":
      return edge.perf;
  }
}

export function edgeLabel(edge: A2AEdge, metric: Metric): string {
  return `${edge.class} (${metricValue(edge, metric).toFixed(2)})`;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Dark fill for frequent activities, light for rare ones. */
export function nodeFill(count: number, maxCount: number): string {
  const share = maxCount > 0 ? count / maxCount : 0;
  const lightness = Math.round(88 - share * 60);
  return `hsl(210, 30%, ${lightness}%)`;
}

function edgeStroke(share: number, selected: boolean): string {
  if (selected) return "#d9480f";
  const lightness = Math.round(72 - share * 48);
  return `hsl(210, 45%, ${lightness}%)`;
}

export function renderGraph(graph: A2AGraph, options: RenderOptions): string {
  if (graph.nodes.length === 0) {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="420" height="120">` +
      `<text x="210" y="60" text-anchor="middle" class="empty-note" fill="#666">no data</text></svg>`
    );
  }

  const layoutOpts: Partial<LayoutOptions> = {
    parallelEdgeSpacing: options.parallelEdgeSpacing,
    interRankSpacing: options.interRankSpacing,
    intraCellSpacing: options.intraCellSpacing,
  };
  const layout = layoutGraph(
    graph.nodes.map((n) => n.activity),
    graph.edges.map((e) => ({ key: edgeKeyId(edgeKeyOf(e)), source: e.source, target: e.target })),
    layoutOpts,
  );

  const byKey = new Map(graph.edges.map((e) => [edgeKeyId(edgeKeyOf(e)), e]));
  const counts = new Map(graph.nodes.map((n) => [n.activity, n.count]));
  const maxCount = Math.max(0, ...graph.nodes.map((n) => n.count));
  const maxValue = Math.max(1e-12, ...graph.edges.map((e) => metricValue(e, options.metric)));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${layout.width}" height="${layout.height}" ` +
      `viewBox="0 0 ${layout.width} ${layout.height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" ` +
      `markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" fill="context-stroke"/></marker></defs>`,
  );

  for (const edge of layout.edges) {
    const data = byKey.get(edge.key)!;
    const share = metricValue(data, options.metric) / maxValue;
    const selected = options.selected.has(edge.key);
    const width = (1.2 + share * 3.2).toFixed(2);
    parts.push(
      `<g class="edge${selected ? " selected" : ""}" data-key="${esc(edge.key)}">` +
        `<path d="${edge.path}" fill="none" stroke="${edgeStroke(share, selected)}" ` +
        `stroke-width="${width}" marker-end="url(#arrow)"/>` +
        `<path d="${edge.path}" fill="none" stroke="transparent" stroke-width="12" class="edge-hit"/>` +
        `<text x="${edge.labelX.toFixed(1)}" y="${edge.labelY.toFixed(1)}" text-anchor="middle" ` +
        `fill="${selected ? "#d9480f" : "#333"}">${esc(edgeLabel(data, options.metric))}</text></g>`,
    );
  }

  for (const node of layout.nodes) {
    const count = counts.get(node.id) ?? 0;
    const fill = nodeFill(count, maxCount);
    const share = maxCount > 0 ? count / maxCount : 0;
    const textColor = share > 0.55 ? "#fff" : "#111";
    parts.push(
      `<g class="node" data-activity="${esc(node.id)}">` +
        `<rect x="${node.x}" y="${node.y}" width="${node.width}" height="${node.height}" ` +
        `rx="6" fill="${fill}" stroke="#456"/>` +
        `<text x="${node.x + node.width / 2}" y="${node.y + node.height / 2 + 4}" ` +
        `text-anchor="middle" fill="${textColor}">${esc(`${node.id} (${count})`)}</text></g>`,
    );
  }

  parts.push("</svg>");
  return parts.join("");
}

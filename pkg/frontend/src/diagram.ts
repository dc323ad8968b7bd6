/**
 * Client-side renderer for the PlantUML class-diagram subset the service
 * emits: class declarations with attribute bodies, composition ("*--"),
 * association ("-->") and generalization ("<|--"/"--|>") edges.
 *
 * Rendering is DOM-free (returns SVG markup as a string) so it can run in
 * browser and test environments alike. Anything unparseable falls back to
 * the raw text, which the app shows in a <pre> block.
 */

export interface DiagramClass {
  name: string;
  isAbstract: boolean;
  attributes: string[];
}

export type EdgeKind = "composition" | "association" | "generalization";

export interface DiagramEdge {
  kind: EdgeKind;
  /** composition/association: owning class; generalization: subclass */
  from: string;
  /** composition/association: target class; generalization: superclass */
  to: string;
  label: string;
}

export interface DiagramModel {
  classes: DiagramClass[];
  edges: DiagramEdge[];
}

export type RenderResult =
  | { ok: true; svg: string }
  | { ok: false; fallbackText: string; reason: string };

const NAME = "[A-Za-z_][A-Za-z0-9_]*";
const CLASS_RE = new RegExp(`^(abstract\\s+)?class\\s+(${NAME})\\s*(\\{\\s*\\}|\\{)?\\s*$`);
const COMPOSITION_RE = new RegExp(
  `^(${NAME})\\s*(?:"([^"]*)")?\\s*\\*--\\s*(?:"([^"]*)")?\\s*(${NAME})\\s*(?::\\s*(.+?))?\\s*$`,
);
const ASSOCIATION_RE = new RegExp(
  `^(${NAME})\\s*(?:"([^"]*)")?\\s*-->\\s*(?:"([^"]*)")?\\s*(${NAME})\\s*(?::\\s*(.+?))?\\s*$`,
);
const GENERALIZATION_LEFT_RE = new RegExp(`^(${NAME})\\s*<\\|--\\s*(${NAME})\\s*$`);
const GENERALIZATION_RIGHT_RE = new RegExp(`^(${NAME})\\s*--\\|>\\s*(${NAME})\\s*$`);

/** Parse diagram source into a drawable model. Throws on structural errors. */
export function parseDiagram(source: string): DiagramModel {
  const lines = source.split("\n");
  if (!lines.some((l) => l.trim() === "@startuml") || !lines.some((l) => l.trim() === "@enduml")) {
    throw new Error("missing @startuml/@enduml block");
  }
  const classes = new Map<string, DiagramClass>();
  const edges: DiagramEdge[] = [];
  let open: DiagramClass | null = null;

  for (const raw of lines) {
    const line = raw.trim();
    if (!line || line.startsWith("'") || line === "@startuml" || line === "@enduml") continue;

    if (open) {
      if (line === "}") {
        open = null;
      } else {
        open.attributes.push(line);
      }
      continue;
    }

    let match = CLASS_RE.exec(line);
    if (match) {
      const cls: DiagramClass = {
        name: match[2]!,
        isAbstract: Boolean(match[1]),
        attributes: [],
      };
      classes.set(cls.name, cls);
      if (match[3] === "{") open = cls;
      continue;
    }

    match = COMPOSITION_RE.exec(line);
    if (match) {
      edges.push({
        kind: "composition",
        from: match[1]!,
        to: match[4]!,
        label: edgeLabel(match[5], match[3]),
      });
      continue;
    }

    match = ASSOCIATION_RE.exec(line);
    if (match) {
      edges.push({
        kind: "association",
        from: match[1]!,
        to: match[4]!,
        label: edgeLabel(match[5], match[3]),
      });
      continue;
    }

    match = GENERALIZATION_LEFT_RE.exec(line);
    if (match) {
      edges.push({ kind: "generalization", from: match[2]!, to: match[1]!, label: "" });
      continue;
    }
    match = GENERALIZATION_RIGHT_RE.exec(line);
    if (match) {
      edges.push({ kind: "generalization", from: match[1]!, to: match[2]!, label: "" });
      continue;
    }
    // Tolerate anything else: the server-side parser is the authority.
  }

  for (const edge of edges) {
    for (const end of [edge.from, edge.to]) {
      if (!classes.has(end)) {
        throw new Error(`edge names undeclared class '${end}'`);
      }
    }
  }
  return { classes: [...classes.values()], edges };
}

function edgeLabel(label: string | undefined, multiplicity: string | undefined): string {
  const parts: string[] = [];
  if (label) parts.push(label.trim());
  if (multiplicity) parts.push(`[${multiplicity}]`);
  return parts.join(" ");
}

// ---------------------------------------------------------------------------
// Layout + SVG
// ---------------------------------------------------------------------------

const CHAR_W = 8.4;
const LINE_H = 20;
const HEADER_H = 28;
const PAD_X = 12;
const BOX_GAP_X = 60;
const BOX_GAP_Y = 70;
const MARGIN = 24;

interface Box {
  cls: DiagramClass;
  x: number;
  y: number;
  w: number;
  h: number;
}

function measure(cls: DiagramClass): { w: number; h: number } {
  const widest = Math.max(
    cls.name.length + (cls.isAbstract ? 11 : 0),
    ...cls.attributes.map((a) => a.length),
    8,
  );
  return {
    w: Math.ceil(widest * CHAR_W) + PAD_X * 2,
    h: HEADER_H + cls.attributes.length * LINE_H + (cls.attributes.length ? 8 : 0),
  };
}

/**
 * Rank classes by inheritance depth so supertypes sit above subclasses;
 * within a rank, boxes flow left to right.
 */
function layout(model: DiagramModel): Map<string, Box> {
  const depth = new Map<string, number>();
  const supersOf = new Map<string, string[]>();
  for (const cls of model.classes) supersOf.set(cls.name, []);
  for (const edge of model.edges) {
    if (edge.kind === "generalization") supersOf.get(edge.from)?.push(edge.to);
  }
  const depthOf = (name: string, seen: Set<string>): number => {
    if (depth.has(name)) return depth.get(name)!;
    if (seen.has(name)) return 0;
    seen.add(name);
    const supers = supersOf.get(name) ?? [];
    const d = supers.length ? Math.max(...supers.map((s) => depthOf(s, seen))) + 1 : 0;
    depth.set(name, d);
    return d;
  };
  for (const cls of model.classes) depthOf(cls.name, new Set());

  const ranks = new Map<number, DiagramClass[]>();
  for (const cls of model.classes) {
    const d = depth.get(cls.name) ?? 0;
    if (!ranks.has(d)) ranks.set(d, []);
    ranks.get(d)!.push(cls);
  }

  const boxes = new Map<string, Box>();
  let y = MARGIN;
  for (const rank of [...ranks.keys()].sort((a, b) => a - b)) {
    const row = ranks.get(rank)!;
    let x = MARGIN;
    let tallest = 0;
    for (const cls of row) {
      const { w, h } = measure(cls);
      boxes.set(cls.name, { cls, x, y, w, h });
      x += w + BOX_GAP_X;
      tallest = Math.max(tallest, h);
    }
    y += tallest + BOX_GAP_Y;
  }
  return boxes;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Point where the segment from the box center toward (tx, ty) leaves the box. */
function borderPoint(box: Box, tx: number, ty: number): { x: number; y: number } {
  const cx = box.x + box.w / 2;
  const cy = box.y + box.h / 2;
  const dx = tx - cx;
  const dy = ty - cy;
  if (dx === 0 && dy === 0) return { x: cx, y: cy };
  const scaleX = dx !== 0 ? box.w / 2 / Math.abs(dx) : Infinity;
  const scaleY = dy !== 0 ? box.h / 2 / Math.abs(dy) : Infinity;
  const t = Math.min(scaleX, scaleY);
  return { x: cx + dx * t, y: cy + dy * t };
}

function marker(kind: EdgeKind): string {
  switch (kind) {
    case "generalization":
      return "url(#triangle)";
    case "composition":
      return "url(#diamond)";
    case "association":
      return "url(#arrow)";
  }
}

export function renderSvg(model: DiagramModel): string {
  const boxes = layout(model);
  let width = 2 * MARGIN;
  let height = 2 * MARGIN;
  for (const box of boxes.values()) {
    width = Math.max(width, box.x + box.w + MARGIN);
    height = Math.max(height, box.y + box.h + MARGIN);
  }

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" font-family="monospace" font-size="14">`,
    "<defs>",
    '<marker id="triangle" markerWidth="16" markerHeight="14" refX="15" refY="7" orient="auto">' +
      '<path d="M1,1 L15,7 L1,13 Z" fill="white" stroke="#39496b"/></marker>',
    '<marker id="diamond" markerWidth="18" markerHeight="12" refX="17" refY="6" orient="auto">' +
      '<path d="M1,6 L9,1 L17,6 L9,11 Z" fill="#39496b"/></marker>',
    '<marker id="arrow" markerWidth="14" markerHeight="12" refX="13" refY="6" orient="auto">' +
      '<path d="M1,1 L13,6 L1,11" fill="none" stroke="#39496b" stroke-width="1.5"/></marker>',
    "</defs>",
  );

  for (const edge of model.edges) {
    const from = boxes.get(edge.from)!;
    const to = boxes.get(edge.to)!;
    const fromCenter = { x: from.x + from.w / 2, y: from.y + from.h / 2 };
    const toCenter = { x: to.x + to.w / 2, y: to.y + to.h / 2 };
    const start = borderPoint(from, toCenter.x, toCenter.y);
    const stop = borderPoint(to, fromCenter.x, fromCenter.y);
    // composition: diamond sits at the whole (from) end, so draw to->from
    const [a, b] = edge.kind === "composition" ? [stop, start] : [start, stop];
    parts.push(
      `<line x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" ` +
        `stroke="#39496b" stroke-width="1.5" marker-end="${marker(edge.kind)}"/>`,
    );
    if (edge.label) {
      const mx = (a.x + b.x) / 2;
      const my = (a.y + b.y) / 2 - 5;
      parts.push(
        `<text x="${mx.toFixed(1)}" y="${my.toFixed(1)}" text-anchor="middle" ` +
          `fill="#51607e" font-size="12">${escapeXml(edge.label)}</text>`,
      );
    }
  }

  for (const box of boxes.values()) {
    const title = box.cls.isAbstract ? `«abstract» ${box.cls.name}` : box.cls.name;
    parts.push(
      `<g data-class="${escapeXml(box.cls.name)}">`,
      `<rect x="${box.x}" y="${box.y}" width="${box.w}" height="${box.h}" rx="6" ` +
        'fill="#f4f7fc" stroke="#39496b" stroke-width="1.5"/>',
      `<text x="${box.x + box.w / 2}" y="${box.y + 19}" text-anchor="middle" ` +
        `font-weight="bold"${box.cls.isAbstract ? ' font-style="italic"' : ""}>` +
        `${escapeXml(title)}</text>`,
    );
    if (box.cls.attributes.length) {
      parts.push(
        `<line x1="${box.x}" y1="${box.y + HEADER_H}" x2="${box.x + box.w}" ` +
          `y2="${box.y + HEADER_H}" stroke="#39496b"/>`,
      );
      box.cls.attributes.forEach((attr, i) => {
        parts.push(
          `<text x="${box.x + PAD_X}" y="${box.y + HEADER_H + 16 + i * LINE_H}">` +
            `${escapeXml(attr)}</text>`,
        );
      });
    }
    parts.push("</g>");
  }

  parts.push("</svg>");
  return parts.join("\n");
}

/** Render if possible; otherwise hand the raw text back for a <pre> fallback. */
export function renderDiagram(source: string): RenderResult {
  if (!source.trim()) {
    return { ok: false, fallbackText: source, reason: "empty diagram source" };
  }
  try {
    return { ok: true, svg: renderSvg(parseDiagram(source)) };
  } catch (error) {
    return {
      ok: false,
      fallbackText: source,
      reason: error instanceof Error ? error.message : String(error),
    };
  }
}

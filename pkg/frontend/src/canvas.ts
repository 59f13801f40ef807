/**
 * Canvas renderer for result graphs: draws the scene, lets nodes be
 * dragged, and shows full feature lines in a hover tooltip.
 */

import type { GraphPayload } from './graphjson.js';
import { buildScene, nodeAt, type NodeBox, type Scene } from './scene.js';

const TITLE_FONT = 'bold 13px system-ui, sans-serif';
const STEREO_FONT = 'italic 12px system-ui, sans-serif';
const LINE_FONT = '12px ui-monospace, monospace';

export class CanvasRenderer {
  private readonly ctx: CanvasRenderingContext2D;
  private scene: Scene | null = null;
  private message: string | null = null;
  private dragging: { node: NodeBox; offsetX: number; offsetY: number } | null =
    null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly tooltip: HTMLElement,
  ) {
    const ctx = canvas.getContext('2d');
    if (!ctx) throw new Error('canvas 2d context unavailable');
    this.ctx = ctx;
    canvas.addEventListener('pointerdown', (ev) => this.onDown(ev));
    canvas.addEventListener('pointermove', (ev) => this.onMove(ev));
    canvas.addEventListener('pointerup', () => this.onUp());
    canvas.addEventListener('pointerleave', () => {
      this.onUp();
      this.hideTooltip();
    });
  }

  show(payload: GraphPayload): void {
    this.fitToElement();
    if (payload.nodes.length === 0) {
      this.scene = null;
      this.message = 'empty result';
    } else {
      this.message = null;
      this.scene = buildScene(payload, this.viewWidth(), this.viewHeight());
    }
    this.draw();
  }

  showMessage(text: string): void {
    this.fitToElement();
    this.scene = null;
    this.message = text;
    this.draw();
  }

  private viewWidth(): number {
    return this.canvas.clientWidth || 900;
  }

  private viewHeight(): number {
    return this.canvas.clientHeight || 600;
  }

  private fitToElement(): void {
    const dpr = window.devicePixelRatio || 1;
    const w = this.viewWidth();
    const h = this.viewHeight();
    this.canvas.width = Math.round(w * dpr);
    this.canvas.height = Math.round(h * dpr);
    this.ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  }

  // -- input -----------------------------------------------------------

  private eventPoint(ev: PointerEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  private onDown(ev: PointerEvent): void {
    if (!this.scene) return;
    const { x, y } = this.eventPoint(ev);
    const node = nodeAt(this.scene, x, y);
    if (node) {
      this.dragging = { node, offsetX: x - node.x, offsetY: y - node.y };
      this.canvas.setPointerCapture(ev.pointerId);
    }
  }

  private onMove(ev: PointerEvent): void {
    if (!this.scene) return;
    const { x, y } = this.eventPoint(ev);
    if (this.dragging) {
      this.dragging.node.x = x - this.dragging.offsetX;
      this.dragging.node.y = y - this.dragging.offsetY;
      this.hideTooltip();
      this.draw();
      return;
    }
    const node = nodeAt(this.scene, x, y);
    if (node && (node.title || node.lines.length > 0)) {
      this.showTooltip(node, ev.clientX, ev.clientY);
    } else {
      this.hideTooltip();
    }
  }

  private onUp(): void {
    this.dragging = null;
  }

  private showTooltip(node: NodeBox, clientX: number, clientY: number): void {
    const parts = [node.title, ...node.lines].filter((s) => s !== '');
    this.tooltip.textContent = parts.join('\n');
    this.tooltip.style.display = 'block';
    this.tooltip.style.left = `${clientX + 14}px`;
    this.tooltip.style.top = `${clientY + 14}px`;
  }

  private hideTooltip(): void {
    this.tooltip.style.display = 'none';
  }

  // -- drawing -----------------------------------------------------------

  private draw(): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.viewWidth(), this.viewHeight());
    if (this.message !== null) {
      ctx.font = TITLE_FONT;
      ctx.fillStyle = '#333';
      ctx.textAlign = 'center';
      ctx.fillText(this.message, this.viewWidth() / 2, this.viewHeight() / 2);
      ctx.textAlign = 'left';
      return;
    }
    if (!this.scene) return;
    for (const edge of this.scene.edges) this.drawEdge(edge);
    for (const node of this.scene.nodes) this.drawNode(node);
  }

  private drawEdge(edge: Scene['edges'][number]): void {
    const scene = this.scene;
    if (!scene) return;
    const a = scene.byId.get(edge.from);
    const b = scene.byId.get(edge.to);
    if (!a || !b) return;
    const start = borderPoint(a, b.x, b.y);
    const end = borderPoint(b, a.x, a.y);
    const ctx = this.ctx;

    ctx.save();
    ctx.strokeStyle = edge.paint.color;
    ctx.fillStyle = edge.paint.color;
    ctx.lineWidth = 1.4;
    if (edge.paint.dashed) ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(start.x, start.y);
    ctx.lineTo(end.x, end.y);
    ctx.stroke();
    ctx.setLineDash([]);

    const angle = Math.atan2(end.y - start.y, end.x - start.x);
    if (edge.paint.head === 'vee') drawVee(ctx, end.x, end.y, angle);
    if (edge.paint.tailDiamond) drawDiamond(ctx, start.x, start.y, angle);

    if (edge.label) {
      const mx = (start.x + end.x) / 2;
      const my = (start.y + end.y) / 2;
      ctx.font = LINE_FONT;
      const w = ctx.measureText(edge.label).width;
      ctx.fillStyle = 'rgba(255,255,255,0.85)';
      ctx.fillRect(mx - w / 2 - 2, my - 8, w + 4, 14);
      ctx.fillStyle = edge.paint.color;
      ctx.fillText(edge.label, mx - w / 2, my + 3);
    }
    ctx.restore();
  }

  private drawNode(node: NodeBox): void {
    const ctx = this.ctx;
    const left = node.x - node.w / 2;
    const top = node.y - node.h / 2;

    if (node.paint.shape === 'point') {
      ctx.fillStyle = node.paint.fill;
      ctx.beginPath();
      ctx.arc(node.x, node.y, 4, 0, 2 * Math.PI);
      ctx.fill();
      return;
    }

    if (node.paint.shape === 'card') {
      ctx.font = STEREO_FONT;
      ctx.fillStyle = '#333';
      ctx.fillText(node.title, left + 6, node.y + 4);
      return;
    }

    ctx.fillStyle = node.paint.fill;
    ctx.strokeStyle = '#333';
    ctx.lineWidth = 1;
    ctx.fillRect(left, top, node.w, node.h);
    ctx.strokeRect(left, top, node.w, node.h);

    if (node.paint.shape === 'header') {
      ctx.fillStyle = '#333';
      ctx.font = STEREO_FONT;
      ctx.textAlign = 'center';
      ctx.fillText(node.paint.stereotype, node.x, top + 16);
      ctx.font = TITLE_FONT;
      ctx.fillText(node.title, node.x, top + 34);
      ctx.textAlign = 'left';
      return;
    }

    // record: title bar plus one row per feature line
    ctx.fillStyle = '#333';
    ctx.font = TITLE_FONT;
    ctx.textAlign = 'center';
    ctx.fillText(node.title, node.x, top + 15);
    ctx.textAlign = 'left';
    ctx.beginPath();
    ctx.moveTo(left, top + 22);
    ctx.lineTo(left + node.w, top + 22);
    ctx.stroke();
    ctx.font = LINE_FONT;
    node.lines.forEach((line, i) => {
      ctx.fillText(line, left + 8, top + 38 + i * 16);
    });
  }
}

/** Point on the border of `node`'s box along the ray towards (tx, ty). */
function borderPoint(
  node: NodeBox,
  tx: number,
  ty: number,
): { x: number; y: number } {
  const dx = tx - node.x;
  const dy = ty - node.y;
  if (dx === 0 && dy === 0) return { x: node.x, y: node.y };
  const hw = node.w / 2;
  const hh = node.h / 2;
  const scale = 1 / Math.max(Math.abs(dx) / hw, Math.abs(dy) / hh, 1e-9);
  const t = Math.min(1, scale);
  return { x: node.x + dx * t, y: node.y + dy * t };
}

function drawVee(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  angle: number,
): void {
  const size = 9;
  const spread = 0.45;
  ctx.beginPath();
  ctx.moveTo(x - size * Math.cos(angle - spread), y - size * Math.sin(angle - spread));
  ctx.lineTo(x, y);
  ctx.lineTo(x - size * Math.cos(angle + spread), y - size * Math.sin(angle + spread));
  ctx.stroke();
}

function drawDiamond(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  angle: number,
): void {
  const size = 7;
  const ax = Math.cos(angle);
  const ay = Math.sin(angle);
  const px = -ay;
  const py = ax;
  ctx.beginPath();
  ctx.moveTo(x, y);
  ctx.lineTo(x + size * ax + (size / 2) * px, y + size * ay + (size / 2) * py);
  ctx.lineTo(x + 2 * size * ax, y + 2 * size * ay);
  ctx.lineTo(x + size * ax - (size / 2) * px, y + size * ay - (size / 2) * py);
  ctx.closePath();
  ctx.fill();
}

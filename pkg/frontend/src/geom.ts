// Canvas <-> world transforms. Canvas y grows downward; world y grows
// upward with row 0 at the south edge, so the vertical axis flips.

import type { Cell } from "./protocol.js";

export class CanvasGeometry {
  constructor(
    readonly widthPx: number,
    readonly heightPx: number,
    readonly gridWidth: number,
    readonly gridHeight: number,
    readonly cellSize: number,
  ) {}

  get cellPx(): number {
    return this.widthPx / this.gridWidth;
  }

  get worldWidth(): number {
    return this.gridWidth * this.cellSize;
  }

  get worldHeight(): number {
    return this.gridHeight * this.cellSize;
  }

  pixelToWorld(px: number, py: number): [number, number] {
    const x = (px / this.widthPx) * this.worldWidth;
    const y = ((this.heightPx - py) / this.heightPx) * this.worldHeight;
    return [x, y];
  }

  worldToPixel(x: number, y: number): [number, number] {
    const px = (x / this.worldWidth) * this.widthPx;
    const py = this.heightPx - (y / this.worldHeight) * this.heightPx;
    return [px, py];
  }

  pixelToCell(px: number, py: number): Cell {
    const [x, y] = this.pixelToWorld(px, py);
    const col = Math.min(Math.floor(x / this.cellSize), this.gridWidth - 1);
    const row = Math.min(Math.floor(y / this.cellSize), this.gridHeight - 1);
    return [Math.max(0, col), Math.max(0, row)];
  }

  // top-left pixel corner of a cell's drawn rectangle
  cellToPixelRect(cell: Cell): [number, number, number, number] {
    const cw = this.widthPx / this.gridWidth;
    const ch = this.heightPx / this.gridHeight;
    return [cell[0] * cw, this.heightPx - (cell[1] + 1) * ch, cw, ch];
  }
}

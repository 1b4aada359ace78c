/**
 * Minimal NPY v1.0 reader/writer for the toolkit's interchange subset:
 * little-endian float32/float64, C order, 1-D or 2-D.
 */

import * as fs from "node:fs";

export interface NpyArray {
  data: Float64Array;
  shape: number[];
  /** dtype the file declared; data is always up-converted to float64 */
  dtype: "<f4" | "<f8";
}

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

export class NpyFormatError extends Error {}

export function readNpy(path: string): NpyArray {
  const buf = fs.readFileSync(path);
  if (buf.length < 10 || !buf.subarray(0, 6).equals(MAGIC)) {
    throw new NpyFormatError(`${path}: bad NPY magic`);
  }
  if (buf[6] !== 1 || buf[7] !== 0) {
    throw new NpyFormatError(`${path}: unsupported NPY version ${buf[6]}.${buf[7]}`);
  }
  const headerLen = buf.readUInt16LE(8);
  const headerEnd = 10 + headerLen;
  const header = buf.subarray(10, headerEnd).toString("latin1");

  const descrMatch = header.match(/'descr':\s*'([^']+)'/);
  const fortranMatch = header.match(/'fortran_order':\s*(True|False)/);
  const shapeMatch = header.match(/'shape':\s*\(([^)]*)\)/);
  if (!descrMatch || !fortranMatch || !shapeMatch) {
    throw new NpyFormatError(`${path}: malformed NPY header: ${header}`);
  }
  const descr = descrMatch[1];
  if (descr !== "<f4" && descr !== "<f8") {
    throw new NpyFormatError(`${path}: unsupported dtype ${descr}`);
  }
  if (fortranMatch[1] === "True") {
    throw new NpyFormatError(`${path}: fortran_order is unsupported`);
  }
  const shape = shapeMatch[1]
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map((s) => Number.parseInt(s, 10));
  if (shape.length < 1 || shape.length > 2 || shape.some(Number.isNaN)) {
    throw new NpyFormatError(`${path}: unsupported shape (${shapeMatch[1]})`);
  }

  const count = shape.reduce((a, b) => a * b, 1);
  const itemSize = descr === "<f4" ? 4 : 8;
  const payload = buf.subarray(headerEnd);
  if (payload.length !== count * itemSize) {
    throw new NpyFormatError(
      `${path}: payload is ${payload.length} bytes, expected ${count * itemSize}`,
    );
  }
  // copy into a fresh ArrayBuffer so the view is aligned and owned
  const copy = new Uint8Array(payload.length);
  copy.set(payload);
  const data = new Float64Array(count);
  if (descr === "<f4") {
    data.set(new Float32Array(copy.buffer));
  } else {
    data.set(new Float64Array(copy.buffer));
  }
  return { data, shape, dtype: descr };
}

export function writeNpy(path: string, data: Float64Array, shape: number[]): void {
  const count = shape.reduce((a, b) => a * b, 1);
  if (count !== data.length) {
    throw new NpyFormatError(
      `shape [${shape}] does not match ${data.length} values`,
    );
  }
  const shapeStr =
    shape.length === 1 ? `(${shape[0]},)` : `(${shape[0]}, ${shape[1]})`;
  let header = `{'descr': '<f8', 'fortran_order': False, 'shape': ${shapeStr}, }`;
  const unpadded = 6 + 2 + 2 + header.length + 1;
  header += " ".repeat((64 - (unpadded % 64)) % 64) + "\n";

  const head = Buffer.alloc(10);
  MAGIC.copy(head);
  head[6] = 1;
  head[7] = 0;
  head.writeUInt16LE(header.length, 8);
  const payload = Buffer.from(data.buffer, data.byteOffset, data.byteLength);
  fs.writeFileSync(
    path,
    Buffer.concat([head, Buffer.from(header, "latin1"), payload]),
  );
}

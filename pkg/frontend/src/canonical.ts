/** Canonical JSON, byte-for-byte compatible with the server's serializer
 * (sorted keys, "," and ":" separators without spaces, non-ASCII kept raw).
 *
 * The byte-identity contract between fetch and submit rides on this: both
 * sides must turn the same object into the same string. Payload numbers are
 * integers by contract, so float formatting can never diverge; a non-integer
 * here is a bug upstream and is rejected loudly.
 */

function compareCodePoints(a: string, b: string): number {
  // Array.prototype.sort on strings compares UTF-16 units; the server sorts
  // keys by code point. Identical for ASCII keys, but stay exact anyway.
  const pa = Array.from(a);
  const pb = Array.from(b);
  const n = Math.min(pa.length, pb.length);
  for (let i = 0; i < n; i++) {
    const ca = pa[i]!.codePointAt(0)!;
    const cb = pb[i]!.codePointAt(0)!;
    if (ca !== cb) return ca - cb;
  }
  return pa.length - pb.length;
}

export function canonicalJson(value: unknown): string {
  if (value === null) return "null";
  switch (typeof value) {
    case "boolean":
      return value ? "true" : "false";
    case "number":
      if (!Number.isInteger(value)) {
        throw new Error(`non-integer number in payload: ${value}`);
      }
      return String(value);
    case "string":
      // JSON.stringify escapes exactly what the server does for raw-unicode
      // output: quote, backslash, and control characters.
      return JSON.stringify(value);
    case "object": {
      if (Array.isArray(value)) {
        return "[" + value.map((item) => canonicalJson(item)).join(",") + "]";
      }
      const record = value as Record<string, unknown>;
      const keys = Object.keys(record)
        .filter((k) => record[k] !== undefined)
        .sort(compareCodePoints);
      const parts = keys.map(
        (k) => canonicalJson(k) + ":" + canonicalJson(record[k]),
      );
      return "{" + parts.join(",") + "}";
    }
    default:
      throw new Error(`cannot serialize ${typeof value} in payload`);
  }
}

/**
 * The protocol speaks byte offsets into UTF-8 text; the editor speaks
 * character offsets. These helpers convert between the two.
 */

export function byteOffsetOf(text: string, charOffset: number): number {
  return Buffer.byteLength(text.slice(0, charOffset), "utf8");
}

export function charOffsetOf(text: string, byteOffset: number): number {
  const bytes = Buffer.from(text, "utf8");
  return bytes.subarray(0, byteOffset).toString("utf8").length;
}

/** Apply an engine tex edit (byte range + replacement) to a JS string. */
export function applyTexEdit(
  text: string,
  edit: { start: number; end: number; replacement: string }
): string {
  const bytes = Buffer.from(text, "utf8");
  return (
    bytes.subarray(0, edit.start).toString("utf8") +
    edit.replacement +
    bytes.subarray(edit.end).toString("utf8")
  );
}

"use strict";
/**
 * The protocol speaks byte offsets into UTF-8 text; the editor speaks
 * character offsets. These helpers convert between the two.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.byteOffsetOf = byteOffsetOf;
exports.charOffsetOf = charOffsetOf;
exports.applyTexEdit = applyTexEdit;
function byteOffsetOf(text, charOffset) {
    return Buffer.byteLength(text.slice(0, charOffset), "utf8");
}
function charOffsetOf(text, byteOffset) {
    const bytes = Buffer.from(text, "utf8");
    return bytes.subarray(0, byteOffset).toString("utf8").length;
}
/** Apply an engine tex edit (byte range + replacement) to a JS string. */
function applyTexEdit(text, edit) {
    const bytes = Buffer.from(text, "utf8");
    return (bytes.subarray(0, edit.start).toString("utf8") +
        edit.replacement +
        bytes.subarray(edit.end).toString("utf8"));
}
//# sourceMappingURL=offsets.js.map
"use strict";
/**
 * Wire types for the engine's stdio JSON-RPC protocol.
 *
 * One JSON-RPC 2.0 message per line, UTF-8. All offsets are byte offsets
 * into the UTF-8 encoding of the document text.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.RpcError = exports.RPC_ERRORS = void 0;
/** JSON-RPC error codes the engine maps domain failures onto. */
exports.RPC_ERRORS = {
    [-32001]: "The cursor is not inside a citation command.",
    [-32002]: "Authentication failed: configure an API token.",
    [-32003]: "API rate limit exhausted.",
    [-32004]: "No matching papers, even after widening the search.",
    [-32005]: "The file changed on disk; try again.",
    [-32006]: "No bibliography target: add \\bibliography{...} or set a target file.",
};
class RpcError extends Error {
    code;
    data;
    constructor(code, message, data) {
        super(message);
        this.code = code;
        this.data = data;
        this.name = "RpcError";
    }
    /** Human-oriented text for notifications. */
    get friendlyMessage() {
        return exports.RPC_ERRORS[this.code] ?? this.message;
    }
}
exports.RpcError = RpcError;
//# sourceMappingURL=protocol.js.map
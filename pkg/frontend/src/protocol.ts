/**
 * Wire types for the engine's stdio JSON-RPC protocol.
 *
 * One JSON-RPC 2.0 message per line, UTF-8. All offsets are byte offsets
 * into the UTF-8 encoding of the document text.
 */

export type SearchMode = "contextual" | "simple" | "ads";

export interface CuePayload {
  raw: string;
  mode: SearchMode;
  surname: string | null;
  initial: string | null;
  year: number | null;
  is_collaboration: boolean;
  ads_query: string | null;
}

export interface ScoreComponents {
  author: number;
  year: number;
  initial: number;
  context: number;
  popularity: number;
}

export interface Candidate {
  bibcode: string;
  title: string;
  /** first three authors; a literal "et al." is appended when truncated */
  authors: string[];
  year: number;
  pub: string | null;
  citation_count: number;
  score_total: number;
  score_components: ScoreComponents;
}

export interface ResolveResult {
  cue: CuePayload;
  candidates: Candidate[];
  widened: boolean;
}

export interface TexEditPayload {
  uri: string;
  start: number;
  end: number;
  replacement: string;
}

export interface SelectResult {
  edits: {
    tex_edit: TexEditPayload;
    bib_edit: { path: string; new_text: string } | null;
    final_key: string;
    reused_existing: boolean;
    paths_touched?: string[];
  };
  final_key: string;
}

export interface ResolveParams {
  text: string;
  offset: number;
  mode?: SearchMode;
  max_results?: number;
}

export interface SelectParams {
  text: string;
  offset: number;
  bibcode: string;
  key_style?: string;
  order_policy?: string;
  target_bib?: string;
}

export interface EngineConfig {
  key_style?: string;
  order_policy?: string;
  target_bib?: string;
  default_mode?: SearchMode;
  api_base?: string;
}

/** JSON-RPC error codes the engine maps domain failures onto. */
export const RPC_ERRORS: Record<number, string> = {
  [-32001]: "The cursor is not inside a citation command.",
  [-32002]: "Authentication failed: configure an API token.",
  [-32003]: "API rate limit exhausted.",
  [-32004]: "No matching papers, even after widening the search.",
  [-32005]: "The file changed on disk; try again.",
  [-32006]: "No bibliography target: add \\bibliography{...} or set a target file.",
};

export class RpcError extends Error {
  constructor(
    public readonly code: number,
    message: string,
    public readonly data?: unknown
  ) {
    super(message);
    this.name = "RpcError";
  }

  /** Human-oriented text for notifications. */
  get friendlyMessage(): string {
    return RPC_ERRORS[this.code] ?? this.message;
  }
}

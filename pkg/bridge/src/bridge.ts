/**
 * Core of the simplifier bridge: a stdin/stdout line protocol around a
 * pluggable "simplify one string" function.
 *
 * The parent process sends one JSON object per line ({"id", "text"}) and
 * expects exactly one response object per request, after an initial READY
 * line. Malformed requests get an "error" response instead of killing the
 * loop; closing stdin shuts the bridge down with exit status 0.
 */

import readline from "node:readline";
import path from "node:path";
import { pathToFileURL } from "node:url";

export type BridgeMode = "model" | "echo" | "mock-mark";

export interface BridgeConfig {
  mode: BridgeMode;
  /** Module specifier of the wrapped model; ignored by the mock modes. */
  modelLocator?: string;
  maxInputLength: number;
}

export type SimplifyFn = (text: string) => string | Promise<string>;

export const MARKER = "<SIMP>";
export const DEFAULT_MAX_INPUT_LENGTH = 10_000;

const USAGE =
  "usage: bridge --mode echo|mock-mark|model [--model LOCATOR] [--max-input-length N]";

export function parseArgs(argv: string[]): BridgeConfig {
  let mode: string | undefined;
  let modelLocator: string | undefined;
  let maxInputLength = DEFAULT_MAX_INPUT_LENGTH;

  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    const value = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`${arg} needs a value\n${USAGE}`);
      return argv[i];
    };
    if (arg === "--mode") mode = value();
    else if (arg === "--model") modelLocator = value();
    else if (arg === "--max-input-length") {
      maxInputLength = Number(value());
      if (!Number.isInteger(maxInputLength) || maxInputLength < 1) {
        throw new Error(`--max-input-length must be a positive integer\n${USAGE}`);
      }
    } else throw new Error(`unknown argument ${arg}\n${USAGE}`);
  }

  if (mode !== "model" && mode !== "echo" && mode !== "mock-mark") {
    throw new Error(`--mode must be model, echo, or mock-mark\n${USAGE}`);
  }
  if (mode === "model" && !modelLocator) {
    throw new Error(`model mode needs --model LOCATOR\n${USAGE}`);
  }
  return { mode, modelLocator, maxInputLength };
}

/** Resolve the simplifier before the handshake; failures must abort pre-READY. */
export async function loadSimplifier(config: BridgeConfig): Promise<SimplifyFn> {
  if (config.mode === "echo") return (text) => text;
  if (config.mode === "mock-mark") return (text) => `${MARKER} ${text}`;

  const locator = config.modelLocator!;
  const specifier =
    locator.startsWith(".") || locator.startsWith("/") || locator.startsWith("file:")
      ? pathToFileURL(path.resolve(locator)).href
      : locator;
  const loaded = await import(specifier);
  const fn = loaded.simplify ?? loaded.default;
  if (typeof fn !== "function") {
    throw new Error(`model module ${locator} does not export a simplify function`);
  }
  return fn as SimplifyFn;
}

/** One response line (without newline) for one request line. */
export async function respond(
  line: string,
  simplify: SimplifyFn,
  maxInputLength: number,
): Promise<string> {
  let request: unknown;
  try {
    request = JSON.parse(line);
  } catch {
    return JSON.stringify({ id: null, text: "", error: "request line is not valid JSON" });
  }
  const record = request as { id?: unknown; text?: unknown };
  const id = record?.id ?? null;
  if (typeof record?.text !== "string") {
    return JSON.stringify({ id, text: "", error: "request has no text field" });
  }

  let text = record.text;
  if (text.length > maxInputLength) {
    console.error(`bridge: truncating request ${String(id)} to ${maxInputLength} characters`);
    text = text.slice(0, maxInputLength);
  }
  try {
    return JSON.stringify({ id, text: await simplify(text) });
  } catch (err) {
    return JSON.stringify({ id, text: record.text, error: String(err) });
  }
}

/** Run the request loop until stdin closes. Requests are answered in arrival order. */
export async function serve(config: BridgeConfig): Promise<void> {
  const simplify = await loadSimplifier(config);
  process.stdout.write("READY\n");

  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  let chain: Promise<void> = Promise.resolve();
  rl.on("line", (line) => {
    if (!line.trim()) return;
    chain = chain.then(async () => {
      process.stdout.write((await respond(line, simplify, config.maxInputLength)) + "\n");
    });
  });
  await new Promise<void>((resolve) => rl.once("close", resolve));
  await chain;
}

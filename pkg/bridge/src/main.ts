#!/usr/bin/env node
import { parseArgs, serve } from "./bridge.js";

let config;
try {
  config = parseArgs(process.argv.slice(2));
} catch (err) {
  console.error(`bridge: ${err instanceof Error ? err.message : String(err)}`);
  process.exit(2);
}

serve(config).then(
  () => process.exit(0),
  (err) => {
    console.error(`bridge: ${err instanceof Error ? err.message : String(err)}`);
    process.exit(1);
  },
);

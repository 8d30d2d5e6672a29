/**
 * Figure-generation entry point.
 *
 *   node dist/cli.js timeline --rounds R.csv --states S.csv --out FIG.svg
 *   node dist/cli.js tradeoff --in sweep_summary.csv --out-dir DIR
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { CsvSchemaError } from "./csv.js";
import { renderTimeline } from "./timeline.js";
import { renderTradeoff } from "./tradeoff.js";

function parseFlags(argv: string[], required: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    flags.set(key.slice(2), value);
  }
  for (const name of required) {
    if (!flags.has(name)) throw new Error(`missing required flag --${name}`);
  }
  return flags;
}

export function runCli(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "timeline") {
      const flags = parseFlags(rest, ["rounds", "states", "out"]);
      const figure = renderTimeline(
        readFileSync(flags.get("rounds")!, "utf-8"),
        readFileSync(flags.get("states")!, "utf-8"));
      mkdirSync(dirname(flags.get("out")!), { recursive: true });
      writeFileSync(flags.get("out")!, figure, "utf-8");
      console.log(`wrote ${flags.get("out")}`);
      return 0;
    }
    if (command === "tradeoff") {
      const flags = parseFlags(rest, ["in", "out-dir"]);
      const panels = renderTradeoff(readFileSync(flags.get("in")!, "utf-8"));
      mkdirSync(flags.get("out-dir")!, { recursive: true });
      for (const [name, svg] of panels) {
        writeFileSync(join(flags.get("out-dir")!, name), svg, "utf-8");
        console.log(`wrote ${join(flags.get("out-dir")!, name)}`);
      }
      return 0;
    }
    console.error("usage: cli.js <timeline|tradeoff> [flags]");
    return 2;
  } catch (error) {
    if (error instanceof CsvSchemaError) {
      console.error(`schema error: ${error.message}`);
      return 2;
    }
    console.error(String(error instanceof Error ? error.message : error));
    return 2;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  process.exit(runCli(process.argv.slice(2)));
}

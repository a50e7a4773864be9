/** CLI: render one figure manifest to an SVG file. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { CsvError } from "./csv.js";
import { loadManifest, ManifestError } from "./manifest.js";
import { renderManifest } from "./render.js";

function parseArgs(argv: string[]): { manifest: string; out: string } {
  let manifest: string | undefined;
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--manifest") manifest = argv[++i];
    else if (argv[i] === "--out") out = argv[++i];
    else throw new Error(`unknown argument '${argv[i]}' (expected --manifest and --out)`);
  }
  if (!manifest || !out) {
    throw new Error("usage: render --manifest <manifest.json> --out <figure.svg>");
  }
  return { manifest, out };
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const manifest = loadManifest(args.manifest);
    const svg = renderManifest(manifest);
    mkdirSync(dirname(args.out), { recursive: true });
    writeFileSync(args.out, svg, "utf-8");
    console.log(`rendered ${manifest.figure} -> ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof ManifestError || err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${String(err)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}

#!/usr/bin/env node
import * as path from "path";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { renderFile } from "./render";

function inferFormat(outPath: string, explicit?: string): "png" | "svg" {
  if (explicit === "png" || explicit === "svg") return explicit;
  const ext = path.extname(outPath).toLowerCase();
  if (ext === ".png") return "png";
  return "svg";
}

export function main(argv: string[]): void {
  yargs(argv)
    .command(
      "render",
      "Render an experiment CSV as a figure image",
      (cmd) =>
        cmd
          .option("figure", {
            choices: [1, 2, 3] as const,
            demandOption: true,
            type: "number",
            describe: "Figure layout: 1/2 rate vs antennas, 3 rate and efficiency vs bits",
          })
          .option("in", {
            demandOption: true,
            type: "string",
            describe: "Input CSV from the experiment runner",
          })
          .option("out", { demandOption: true, type: "string", describe: "Output image path" })
          .option("format", { choices: ["png", "svg"] as const, describe: "Defaults to the output extension" })
          .option("title", { type: "string" })
          .option("width", { type: "number", default: 870 })
          .option("height", { type: "number", default: 660 }),
      (args) => {
        renderFile({
          figureId: args.figure as 1 | 2 | 3,
          inputCsv: args.in,
          outputPath: args.out,
          format: inferFormat(args.out, args.format),
          title: args.title,
          width: args.width,
          height: args.height,
        });
        console.log(`wrote ${args.out}`);
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err ? `error: ${err.message}` : msg);
      process.exit(1);
    })
    .parseSync();
}

if (require.main === module) {
  main(hideBin(process.argv));
}

import * as fs from "fs";
import * as path from "path";

import * as echarts from "echarts";

import { parseResultTable } from "./csv";
import { FigureLabels, buildFigureOption } from "./figures";

export interface PlotSpec extends FigureLabels {
  figureId: 1 | 2 | 3;
  inputCsv: string;
  outputPath: string;
  format: "png" | "svg";
  width?: number;
  height?: number;
}

const DEFAULT_WIDTH = 870;
const DEFAULT_HEIGHT = 660;

/** Server-side render of a chart option to an SVG string. */
export function svgFromOption(
  option: echarts.EChartsOption,
  width = DEFAULT_WIDTH,
  height = DEFAULT_HEIGHT,
): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function pngFromSvg(svg: string): Buffer {
  // lazy import: the native rasterizer is only needed for PNG output
  const { Resvg } = require("@resvg/resvg-js");
  return new Resvg(svg).render().asPng();
}

function writeAtomic(outputPath: string, payload: string | Buffer): void {
  const tmp = path.join(
    path.dirname(outputPath),
    `.${path.basename(outputPath)}.tmp-${process.pid}`,
  );
  fs.writeFileSync(tmp, payload);
  fs.renameSync(tmp, outputPath);
}

/** Read the CSV, build the figure, and write the image; nothing is written on failure. */
export function renderFile(spec: PlotSpec): void {
  const text = fs.readFileSync(spec.inputCsv, "utf-8");
  const rows = parseResultTable(text);
  const option = buildFigureOption(spec.figureId, rows, spec);
  const svg = svgFromOption(option, spec.width, spec.height);
  if (spec.format === "svg") {
    writeAtomic(spec.outputPath, svg);
  } else {
    writeAtomic(spec.outputPath, pngFromSvg(svg));
  }
}

import type { EChartsOption, SeriesOption } from "echarts";

import { CsvSchemaError, ResultRow, bitsLabel, distinctBits } from "./csv";

const PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface FigureLabels {
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

/**
 * Marker-plus-error-bar renderer for Monte Carlo points.
 * Data rows are [x, mean, stderr]; the whiskers span one standard error.
 */
function markerWithErrorBar(color: string) {
  return (_params: unknown, api: any) => {
    const x = api.value(0);
    const mean = api.value(1);
    const err = api.value(2);
    const center = api.coord([x, mean]);
    const low = api.coord([x, mean - err]);
    const high = api.coord([x, mean + err]);
    const cap = 4;
    const stroke = { stroke: color, fill: "none", lineWidth: 1.2 };
    return {
      type: "group",
      children: [
        { type: "line", shape: { x1: center[0], y1: low[1], x2: center[0], y2: high[1] }, style: stroke },
        { type: "line", shape: { x1: center[0] - cap, y1: low[1], x2: center[0] + cap, y2: low[1] }, style: stroke },
        { type: "line", shape: { x1: center[0] - cap, y1: high[1], x2: center[0] + cap, y2: high[1] }, style: stroke },
        { type: "circle", shape: { cx: center[0], cy: center[1], r: 3 }, style: { fill: color } },
      ],
    };
  };
}

function checkUniqueGridPoints(rows: ResultRow[]): void {
  const seen = new Set<string>();
  for (const row of rows) {
    const key = `${row.m}|${row.bits}`;
    if (seen.has(key)) {
      throw new CsvSchemaError(
        `duplicate grid point M=${row.m}, bits=${bitsLabel(row.bits)}; ` +
          "render expects a single-drop table",
      );
    }
    seen.add(key);
  }
}

/** Rate-versus-antennas layout shared by figures 1 and 2. */
function rateVersusAntennas(rows: ResultRow[], labels: FigureLabels, title: string): EChartsOption {
  checkUniqueGridPoints(rows);
  const series: SeriesOption[] = [];
  const legend: string[] = [];
  distinctBits(rows).forEach((bits, index) => {
    const group = rows.filter((r) => r.bits === bits).sort((a, b) => a.m - b.m);
    const color = seriesColor(index);
    const mcName = `b=${bitsLabel(bits)} (MC)`;
    const approxName = `b=${bitsLabel(bits)} (approx)`;
    legend.push(mcName, approxName);
    series.push({
      name: mcName,
      type: "custom",
      renderItem: markerWithErrorBar(color) as any,
      data: group.map((r) => [r.m, r.sumRateMc, r.sumRateMcStderr]),
      encode: { x: 0, y: [1] },
      color,
      z: 3,
    });
    series.push({
      name: approxName,
      type: "line",
      showSymbol: false,
      data: group.map((r) => [r.m, r.sumRateApprox]),
      color,
      lineStyle: { width: 1.5 },
      z: 2,
    });
  });
  return {
    animation: false,
    title: { text: labels.title ?? title, left: "center" },
    legend: { data: legend, bottom: 0 },
    grid: { left: 70, right: 30, top: 50, bottom: 70 },
    xAxis: {
      type: "log",
      logBase: 2,
      name: labels.xLabel ?? "BS antennas M",
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: "value",
      name: labels.yLabel ?? "sum rate (bit/s/Hz)",
      nameLocation: "middle",
      nameGap: 45,
    },
    series,
  };
}

function figure3(rows: ResultRow[], labels: FigureLabels): EChartsOption {
  const antennaCounts = [...new Set(rows.map((r) => r.m))];
  if (antennaCounts.length !== 1) {
    throw new CsvSchemaError(
      `rate-versus-bits rendering expects a single antenna count, found M in {${antennaCounts.join(", ")}}`,
    );
  }
  const sorted = [...rows].sort((a, b) => a.bits - b.bits);
  const finite = sorted.filter((r) => r.bits !== Infinity);
  if (finite.some((r) => r.energyEfficiency === null)) {
    throw new CsvSchemaError("energy_efficiency is empty on a finite-bits row");
  }
  const series: SeriesOption[] = [
    {
      name: "sum rate (MC)",
      type: "custom",
      renderItem: markerWithErrorBar(seriesColor(0)) as any,
      data: sorted.map((r) => [r.bits, r.sumRateMc, r.sumRateMcStderr]),
      encode: { x: 0, y: [1] },
      color: seriesColor(0),
      z: 3,
    },
    {
      name: "sum rate (approx)",
      type: "line",
      showSymbol: false,
      data: sorted.map((r) => [r.bits, r.sumRateApprox]),
      color: seriesColor(0),
      z: 2,
    },
    {
      // the power model diverges at infinite resolution, so those rows stay out
      name: "energy efficiency",
      type: "line",
      yAxisIndex: 1,
      showSymbol: true,
      symbol: "diamond",
      data: finite.map((r) => [r.bits, r.energyEfficiency as number]),
      color: seriesColor(1),
      lineStyle: { type: "dashed" },
    },
  ];
  return {
    animation: false,
    title: { text: labels.title ?? "Sum rate and energy efficiency vs ADC bits", left: "center" },
    legend: { bottom: 0 },
    grid: { left: 70, right: 80, top: 50, bottom: 70 },
    xAxis: {
      type: "value",
      name: labels.xLabel ?? "ADC bits b",
      nameLocation: "middle",
      nameGap: 28,
      minInterval: 1,
    },
    yAxis: [
      {
        type: "value",
        name: labels.yLabel ?? "sum rate (bit/s/Hz)",
        nameLocation: "middle",
        nameGap: 45,
      },
      {
        type: "value",
        name: "energy efficiency (bit/J)",
        nameLocation: "middle",
        nameGap: 55,
        position: "right",
      },
    ],
    series,
  };
}

/** Build the chart description for one of the three preset figures. */
export function buildFigureOption(
  figureId: 1 | 2 | 3,
  rows: ResultRow[],
  labels: FigureLabels = {},
): EChartsOption {
  switch (figureId) {
    case 1:
      return rateVersusAntennas(rows, labels, "Uplink sum rate vs number of BS antennas");
    case 2:
      return rateVersusAntennas(rows, labels, "Uplink sum rate vs BS antennas, power scaled as E_u/M");
    case 3:
      return figure3(rows, labels);
  }
}

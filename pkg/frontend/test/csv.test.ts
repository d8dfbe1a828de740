import * as fs from "fs";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { CsvSchemaError, bitsLabel, distinctBits, parseResultTable } from "../src/csv";

const fixture = (name: string) =>
  fs.readFileSync(path.join(__dirname, "fixtures", name), "utf-8");

describe("parseResultTable", () => {
  it("parses the rate-vs-antennas golden table", () => {
    const rows = parseResultTable(fixture("fig1.csv"));
    expect(rows).toHaveLength(15);
    expect(distinctBits(rows)).toEqual([1, 2, Infinity]);
    expect(new Set(rows.map((r) => r.m))).toEqual(new Set([32, 64, 128, 256, 512]));
    for (const row of rows) {
      expect(row.nUsers).toBe(10);
      expect(row.sumRateMc).toBeGreaterThan(0);
      expect(row.sumRateMcStderr).toBeGreaterThan(0);
      if (row.bits === Infinity) {
        expect(row.energyEfficiency).toBeNull();
      } else {
        expect(row.energyEfficiency).toBeGreaterThan(0);
      }
      expect(row.sumRateLimit).toBeNull(); // fixed-power run
    }
  });

  it("parses the power-scaled golden table with its limit column", () => {
    const rows = parseResultTable(fixture("fig2.csv"));
    expect(rows).toHaveLength(24);
    for (const row of rows) {
      expect(row.sumRateLimit).not.toBeNull();
      expect(row.sumRateApprox).toBeLessThan(row.sumRateLimit as number);
      expect(row.pULinear).toBeCloseTo(100 / row.m, 9);
    }
  });

  it("names the missing columns", () => {
    const lines = fixture("fig1.csv").trim().split("\n");
    const dropColumn = (line: string) => line.split(",").slice(0, -2).join(",");
    const truncated = lines.map(dropColumn).join("\n");
    expect(() => parseResultTable(truncated)).toThrowError(/trials, sum_rate_limit/);
  });

  it("rejects a header-only file", () => {
    const header = fixture("fig1.csv").trim().split("\n")[0];
    expect(() => parseResultTable(header)).toThrowError(/no data rows/);
  });

  it("rejects non-numeric fields with row context", () => {
    const lines = fixture("fig1.csv").trim().split("\n");
    const corrupted = [lines[0], lines[1].replace(/^32/, "thirty-two"), ...lines.slice(2)].join("\n");
    expect(() => parseResultTable(corrupted)).toThrowError(CsvSchemaError);
    expect(() => parseResultTable(corrupted)).toThrowError(/row 2.*"M"/);
  });

  it("rejects ragged rows as malformed", () => {
    const lines = fixture("fig1.csv").trim().split("\n");
    const ragged = [lines[0], lines[1] + ",0,0,0", ...lines.slice(2)].join("\n");
    expect(() => parseResultTable(ragged)).toThrowError(/malformed CSV/);
  });

  it("labels infinite resolution with the infinity sign", () => {
    expect(bitsLabel(Infinity)).toBe("∞");
    expect(bitsLabel(3)).toBe("3");
  });
});

import Papa from "papaparse";

/** Column set produced by the experiment runner. */
export const REQUIRED_COLUMNS = [
  "M",
  "N",
  "bits",
  "p_u_linear",
  "sum_rate_mc",
  "sum_rate_mc_stderr",
  "sum_rate_approx",
  "energy_efficiency",
  "drop_seed",
  "fading_seed",
  "trials",
  "sum_rate_limit",
] as const;

export interface ResultRow {
  m: number;
  nUsers: number;
  /** ADC bit depth; Infinity for an ideal converter. */
  bits: number;
  pULinear: number;
  sumRateMc: number;
  sumRateMcStderr: number;
  sumRateApprox: number;
  /** null on infinite-resolution rows (power model undefined there). */
  energyEfficiency: number | null;
  dropSeed: number;
  fadingSeed: number;
  trials: number;
  /** Power-scaling ceiling; null for fixed-power runs. */
  sumRateLimit: number | null;
}

export class CsvSchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvSchemaError";
  }
}

function parseBits(token: string, line: number): number {
  if (token === "inf") return Infinity;
  const value = Number(token);
  if (!Number.isInteger(value) || value < 1) {
    throw new CsvSchemaError(`row ${line}: bits must be a positive integer or "inf", got "${token}"`);
  }
  return value;
}

function requireNumber(record: Record<string, string>, column: string, line: number): number {
  const token = record[column];
  const value = Number(token);
  if (token === undefined || token === "" || !Number.isFinite(value)) {
    throw new CsvSchemaError(`row ${line}: column "${column}" must be numeric, got "${token}"`);
  }
  return value;
}

function optionalNumber(record: Record<string, string>, column: string, line: number): number | null {
  const token = record[column];
  if (token === undefined || token === "") return null;
  const value = Number(token);
  if (!Number.isFinite(value)) {
    throw new CsvSchemaError(`row ${line}: column "${column}" must be numeric or empty, got "${token}"`);
  }
  return value;
}

/** Parse an experiment CSV, enforcing the full result-table schema. */
export function parseResultTable(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvSchemaError(`malformed CSV: ${first.message} (row ${first.row ?? "?"})`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new CsvSchemaError(`missing required columns: ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new CsvSchemaError("CSV contains a header but no data rows");
  }
  return parsed.data.map((record, index) => {
    const line = index + 2; // 1-based, after the header
    return {
      m: requireNumber(record, "M", line),
      nUsers: requireNumber(record, "N", line),
      bits: parseBits(record["bits"] ?? "", line),
      pULinear: requireNumber(record, "p_u_linear", line),
      sumRateMc: requireNumber(record, "sum_rate_mc", line),
      sumRateMcStderr: requireNumber(record, "sum_rate_mc_stderr", line),
      sumRateApprox: requireNumber(record, "sum_rate_approx", line),
      energyEfficiency: optionalNumber(record, "energy_efficiency", line),
      dropSeed: requireNumber(record, "drop_seed", line),
      fadingSeed: requireNumber(record, "fading_seed", line),
      trials: requireNumber(record, "trials", line),
      sumRateLimit: optionalNumber(record, "sum_rate_limit", line),
    };
  });
}

/** "∞" for infinite resolution, the number otherwise. */
export function bitsLabel(bits: number): string {
  return bits === Infinity ? "∞" : String(bits);
}

/** Distinct bit depths, ascending, infinite resolution last. */
export function distinctBits(rows: ResultRow[]): number[] {
  return [...new Set(rows.map((r) => r.bits))].sort((a, b) => a - b);
}

/** Parsing of key-rate scan CSVs (column contract: L_km,total_km,key_rate,scenario). */

export interface CurvePoint {
  L_km: number;
  total_km: number;
  key_rate: number;
  scenario: string;
}

export const HEADER = "L_km,total_km,key_rate,scenario";

export class CsvError extends Error {}

/**
 * Parse one CSV document.  `source` names the file in error messages; rows
 * are 1-indexed including the header so messages match editors.
 */
export function parseCurveCsv(content: string, source: string): CurvePoint[] {
  const lines = content.split(/\r?\n/);
  const points: CurvePoint[] = [];
  let headerSeen = false;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "" || line.startsWith("#")) continue;
    if (!headerSeen) {
      if (line !== HEADER) {
        throw new CsvError(`${source}: row ${i + 1}: expected header '${HEADER}'`);
      }
      headerSeen = true;
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== 4) {
      throw new CsvError(`${source}: row ${i + 1}: expected 4 fields, got ${parts.length}`);
    }
    const [lRaw, totalRaw, rateRaw, scenario] = parts;
    const L_km = Number(lRaw);
    const total_km = Number(totalRaw);
    const key_rate = Number(rateRaw);
    if (!Number.isFinite(L_km) || !Number.isFinite(total_km) || !Number.isFinite(key_rate)) {
      throw new CsvError(`${source}: row ${i + 1}: non-numeric value`);
    }
    if (scenario === "") {
      throw new CsvError(`${source}: row ${i + 1}: empty scenario label`);
    }
    points.push({ L_km, total_km, key_rate, scenario });
  }
  if (!headerSeen) {
    throw new CsvError(`${source}: no header line found`);
  }
  return points;
}

/** Group points by scenario, preserving first-appearance order. */
export function groupByScenario(points: CurvePoint[]): Map<string, CurvePoint[]> {
  const groups = new Map<string, CurvePoint[]>();
  for (const p of points) {
    const bucket = groups.get(p.scenario);
    if (bucket === undefined) {
      groups.set(p.scenario, [p]);
    } else {
      bucket.push(p);
    }
  }
  return groups;
}

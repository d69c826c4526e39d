// SVG chart builders. Display formatting only: values arrive precomputed
// from the service.

const PALETTE = ["#3d6fb4", "#b4573d", "#4d9a64", "#8a63b0", "#b49a3d",
                 "#3da3b4", "#b43d85", "#6b7485"];

export interface Series {
  label: string;
  values: number[];
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function barChart(labels: string[], series: Series[],
                         annotations: string[] = []): string {
  const width = 860, height = 260, padLeft = 70, padBottom = 40, padTop = 16;
  const n = labels.length;
  if (n === 0 || series.length === 0) {
    return '<div class="placeholder">no data</div>';
  }
  const peak = Math.max(1e-9, ...series.flatMap((s) => s.values));
  const plotW = width - padLeft - 10, plotH = height - padBottom - padTop;
  const slot = plotW / n;
  const barW = (slot * 0.8) / series.length;

  const parts: string[] = [`<svg viewBox="0 0 ${width} ${height}" role="img">`];
  for (const frac of [0, 0.25, 0.5, 0.75, 1]) {
    const y = padTop + plotH * (1 - frac);
    parts.push(`<line x1="${padLeft}" y1="${y}" x2="${width - 10}" y2="${y}" stroke="#e3e8ee"/>`);
    parts.push(`<text x="${padLeft - 6}" y="${y + 4}" text-anchor="end" font-size="10">` +
               `${Math.round(peak * frac).toLocaleString("en-US")}</text>`);
  }
  labels.forEach((label, i) => {
    const x0 = padLeft + i * slot + slot * 0.1;
    series.forEach((s, si) => {
      const value = s.values[i] ?? 0;
      const h = (plotH * value) / peak;
      const x = x0 + si * barW;
      const y = padTop + plotH - h;
      parts.push(`<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${barW.toFixed(1)}" ` +
                 `height="${h.toFixed(1)}" fill="${PALETTE[si % PALETTE.length]}">` +
                 `<title>${escapeXml(s.label)} ${escapeXml(label)}: ${value.toFixed(2)}</title></rect>`);
    });
    if (annotations[i]) {
      const top = padTop + plotH - (plotH * (series[0].values[i] ?? 0)) / peak;
      parts.push(`<text x="${(x0 + slot * 0.4).toFixed(1)}" y="${(top - 5).toFixed(1)}" ` +
                 `text-anchor="middle" font-size="11">${escapeXml(annotations[i])}</text>`);
    }
    const step = Math.max(1, Math.floor(n / 12));
    if (i % step === 0) {
      parts.push(`<text x="${(x0 + slot * 0.4).toFixed(1)}" y="${height - padBottom + 14}" ` +
                 `text-anchor="middle" font-size="9">${escapeXml(label)}</text>`);
    }
  });
  if (series.length > 1) {
    series.forEach((s, si) => {
      const x = padLeft + si * 120, y = height - 10;
      parts.push(`<rect x="${x}" y="${y - 9}" width="10" height="10" ` +
                 `fill="${PALETTE[si % PALETTE.length]}"/>`);
      parts.push(`<text x="${x + 14}" y="${y}" font-size="10">${escapeXml(s.label)}</text>`);
    });
  }
  parts.push("</svg>");
  return parts.join("");
}

export function lineChart(labels: string[], series: Series[]): string {
  const width = 860, height = 260, padLeft = 70, padBottom = 40, padTop = 16;
  const n = labels.length;
  if (n === 0 || series.length === 0) {
    return '<div class="placeholder">no data</div>';
  }
  const peak = Math.max(1e-9, ...series.flatMap((s) => s.values));
  const plotW = width - padLeft - 10, plotH = height - padBottom - padTop;
  const xAt = (i: number) => padLeft + (n === 1 ? plotW / 2 : (plotW * i) / (n - 1));
  const yAt = (v: number) => padTop + plotH - (plotH * v) / peak;

  const parts: string[] = [`<svg viewBox="0 0 ${width} ${height}" role="img">`];
  for (const frac of [0, 0.5, 1]) {
    const y = padTop + plotH * (1 - frac);
    parts.push(`<line x1="${padLeft}" y1="${y}" x2="${width - 10}" y2="${y}" stroke="#e3e8ee"/>`);
    parts.push(`<text x="${padLeft - 6}" y="${y + 4}" text-anchor="end" font-size="10">` +
               `${Math.round(peak * frac).toLocaleString("en-US")}</text>`);
  }
  series.forEach((s, si) => {
    const points = s.values.map((v, i) => `${xAt(i).toFixed(1)},${yAt(v).toFixed(1)}`).join(" ");
    parts.push(`<polyline points="${points}" fill="none" ` +
               `stroke="${PALETTE[si % PALETTE.length]}" stroke-width="1.6">` +
               `<title>${escapeXml(s.label)}</title></polyline>`);
    const x = padLeft + si * 120, y = height - 10;
    parts.push(`<rect x="${x}" y="${y - 9}" width="10" height="10" ` +
               `fill="${PALETTE[si % PALETTE.length]}"/>`);
    parts.push(`<text x="${x + 14}" y="${y}" font-size="10">${escapeXml(s.label)}</text>`);
  });
  const step = Math.max(1, Math.floor(n / 10));
  for (let i = 0; i < n; i += step) {
    parts.push(`<text x="${xAt(i).toFixed(1)}" y="${height - padBottom + 14}" ` +
               `text-anchor="middle" font-size="9">${escapeXml(labels[i])}</text>`);
  }
  parts.push("</svg>");
  return parts.join("");
}

/** NPV bars with percentage-difference labels, ascending (cheapest first). */
export function npvChart(rows: Array<{ label: string; npv: string; pct_vs_reference: string }>,
                         reference: string): string {
  const labels = rows.map((r) => r.label);
  const values = rows.map((r) => Number(r.npv));
  const annotations = rows.map((r) => r.label === reference
    ? "reference"
    : `${(Number(r.pct_vs_reference) * 100).toFixed(1)}%`);
  return barChart(labels, [{ label: "npv", values }], annotations);
}

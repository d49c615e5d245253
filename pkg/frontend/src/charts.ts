// Minimal SVG line charts rendered to markup strings (no chart library).

export interface Series {
  name: string;
  points: [number, number][]; // [x, y]
  color: string;
}

const WIDTH = 420;
const HEIGHT = 180;
const PAD = 32;

function extent(values: number[]): [number, number] {
  if (values.length === 0) return [0, 1];
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

export function lineChart(title: string, series: Series[]): string {
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const sx = (x: number) => PAD + ((x - x0) / (x1 - x0 || 1)) * (WIDTH - 2 * PAD);
  const sy = (y: number) => HEIGHT - PAD - ((y - y0) / (y1 - y0 || 1)) * (HEIGHT - 2 * PAD);

  const paths = series
    .filter((s) => s.points.length > 0)
    .map((s) => {
      const d = s.points
        .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p[0]).toFixed(1)},${sy(p[1]).toFixed(1)}`)
        .join(" ");
      return `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5"` +
        ` data-series="${s.name}" data-points="${s.points.length}"/>`;
    })
    .join("");

  const legend = series
    .map((s, i) =>
      `<text x="${PAD + i * 130}" y="14" fill="${s.color}" font-size="11">${s.name}</text>`)
    .join("");

  return (
    `<figure class="chart"><figcaption>${title}</figcaption>` +
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="${title}">` +
    `<rect x="${PAD}" y="${PAD}" width="${WIDTH - 2 * PAD}" height="${HEIGHT - 2 * PAD}"` +
    ` fill="none" stroke="#ccc"/>` +
    `<text x="${PAD - 4}" y="${sy(y1) + 4}" text-anchor="end" font-size="10">${format(y1)}</text>` +
    `<text x="${PAD - 4}" y="${sy(y0) + 4}" text-anchor="end" font-size="10">${format(y0)}</text>` +
    legend + paths +
    `</svg></figure>`
  );
}

function format(value: number): string {
  if (Math.abs(value) >= 1e6) return (value / 1e6).toFixed(1) + "M";
  if (Math.abs(value) >= 1e3) return (value / 1e3).toFixed(1) + "k";
  return value.toPrecision(3);
}

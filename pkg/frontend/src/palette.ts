// The service payload carries bucket indices only, so the client owns
// the colors. These are the 16-bucket thermal ramps bundled with the
// annotation engine, light block then dark block, index = bucket.

export type ThemeName = "light" | "dark";

export const LIGHT_BUCKETS: readonly string[] = [
  "#d7e1f4",
  "#d1e4f2",
  "#cbeaf1",
  "#c4f0ef",
  "#beefe2",
  "#b7efd2",
  "#b0eec0",
  "#a9eeaa",
  "#b2eda2",
  "#c0ed9a",
  "#d1ed93",
  "#e6ed8b",
  "#eddd84",
  "#eec17c",
  "#eea174",
  "#ef7e6c",
];

export const DARK_BUCKETS: readonly string[] = [
  "#213864",
  "#1d3e57",
  "#1a434e",
  "#184846",
  "#194b3e",
  "#1a4f34",
  "#1b5229",
  "#1c541d",
  "#29561c",
  "#37561d",
  "#44561d",
  "#51561c",
  "#5d541f",
  "#6d5024",
  "#7f4a2a",
  "#943e31",
];

export function bucketBackground(theme: ThemeName, bucket: number): string {
  const block = theme === "light" ? LIGHT_BUCKETS : DARK_BUCKETS;
  return block[bucket];
}

function channel(v: number): number {
  const c = v / 255;
  return c <= 0.04045 ? c / 12.92 : ((c + 0.055) / 1.055) ** 2.4;
}

export function relativeLuminance(color: string): number {
  const r = parseInt(color.slice(1, 3), 16);
  const g = parseInt(color.slice(3, 5), 16);
  const b = parseInt(color.slice(5, 7), 16);
  return 0.2126 * channel(r) + 0.7152 * channel(g) + 0.0722 * channel(b);
}

// 0.1754 is where #101010 and #f0f0f0 text tie on contrast ratio, so
// whichever side of it the background falls, the chosen text wins.
export function foregroundFor(background: string): string {
  return relativeLuminance(background) > 0.1754 ? "#101010" : "#f0f0f0";
}

// Venue -> color, stable across queries and sessions: hash the venue
// string, index a fixed categorical palette. No legend ordering involved,
// so a venue keeps its color no matter which venues appear alongside it.

export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
  "#86bcb6",
  "#d37295",
] as const;

// FNV-1a, 32 bit
export function hashString(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function venueColor(venue: string): string {
  return PALETTE[hashString(venue) % PALETTE.length];
}

// Label state cycles for the S and B shortcuts. The order matches how a
// reviewer usually relabels: mark a start, extend, close, or collapse a
// one-frame event, then clear.

export const SACCADE_CYCLE = [
  "NONE",
  "SACCADE_START",
  "SACCADE_IN_PROGRESS",
  "SACCADE_END",
  "SACCADE_START_END",
] as const;

export const BLINK_CYCLE = [
  "NONE",
  "BLINK_START",
  "BLINK_IN_PROGRESS",
  "BLINK_END",
  "BLINK_START_END",
] as const;

export function nextInCycle(cycle: readonly string[], current: string): string {
  const i = cycle.indexOf(current);
  // Unknown values (legacy tags) restart the cycle instead of throwing.
  return cycle[(i + 1) % cycle.length];
}

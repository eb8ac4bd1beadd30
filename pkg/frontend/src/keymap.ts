// Keyboard handling as a pure reducer so the shortcut contract is testable
// without a DOM. handleKey maps one keystroke to a new editor state plus an
// optional effect (save or navigate) for the caller to execute.

import { Annotation, AnnotationPatch } from "./types.js";
import { SACCADE_CYCLE, BLINK_CYCLE, nextInCycle } from "./states.js";

export interface PendingEdit {
  center?: [number, number] | null;
  saccade_state?: string;
  blink_state?: string;
}

export interface EditorState {
  annotation: Annotation;
  revision: number;
  pending: PendingEdit;
}

export type Effect =
  | { kind: "save"; frameIndex: number; patch: AnnotationPatch }
  | { kind: "navigate"; direction: 1 | -1 };

export interface KeyResult {
  state: EditorState;
  effect: Effect | null;
}

export function freshState(annotation: Annotation, revision: number): EditorState {
  return { annotation, revision, pending: {} };
}

export function isDirty(state: EditorState): boolean {
  return Object.keys(state.pending).length > 0;
}

// The center the reviewer currently sees: pending edit if any, else the
// stored value.
export function effectiveCenter(state: EditorState): [number, number] | null {
  if (state.pending.center !== undefined) return state.pending.center;
  const a = state.annotation;
  if (a.center_x === null || a.center_y === null) return null;
  return [a.center_x, a.center_y];
}

export function effectiveSaccade(state: EditorState): string {
  return state.pending.saccade_state ?? state.annotation.saccade_state;
}

export function effectiveBlink(state: EditorState): string {
  return state.pending.blink_state ?? state.annotation.blink_state;
}

const ARROWS: Record<string, [number, number]> = {
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  ArrowUp: [0, -1],
  ArrowDown: [0, 1],
};

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

function moveCenter(state: EditorState, dx: number, dy: number): EditorState {
  // A frame with no center yet starts from the sensor midpoint supplied by
  // the app layer via annotation defaults; here we just skip.
  const center = effectiveCenter(state);
  if (center === null) return state;
  const moved: [number, number] = [round2(center[0] + dx), round2(center[1] + dy)];
  return { ...state, pending: { ...state.pending, center: moved } };
}

export function buildPatch(state: EditorState): AnnotationPatch {
  return { revision: state.revision, ...state.pending };
}

// Arrow keys move the center 1 px (Shift: 5 px). S and B cycle the saccade
// and blink labels. N/P request navigation, Enter requests a save of the
// pending edit, U discards it. Unmapped keys leave everything untouched.
export function handleKey(state: EditorState, key: string, shiftKey = false): KeyResult {
  if (key in ARROWS) {
    const step = shiftKey ? 5 : 1;
    const [ux, uy] = ARROWS[key];
    return { state: moveCenter(state, ux * step, uy * step), effect: null };
  }
  switch (key.toLowerCase()) {
    case "s": {
      const next = nextInCycle(SACCADE_CYCLE, effectiveSaccade(state));
      return { state: { ...state, pending: { ...state.pending, saccade_state: next } }, effect: null };
    }
    case "b": {
      const next = nextInCycle(BLINK_CYCLE, effectiveBlink(state));
      return { state: { ...state, pending: { ...state.pending, blink_state: next } }, effect: null };
    }
    case "n":
      return { state, effect: { kind: "navigate", direction: 1 } };
    case "p":
      return { state, effect: { kind: "navigate", direction: -1 } };
    case "u":
      return { state: { ...state, pending: {} }, effect: null };
    case "enter": {
      if (!isDirty(state)) return { state, effect: null };
      return {
        state,
        effect: {
          kind: "save",
          frameIndex: state.annotation.frame_index,
          patch: buildPatch(state),
        },
      };
    }
    default:
      return { state, effect: null };
  }
}

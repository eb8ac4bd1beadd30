// Shapes returned by the review service. Kept in one place so the rest of
// the UI stays in sync with the backend JSON.

export interface Manifest {
  recording_id: string;
  frame_count: number;
  window_us: number;
  sensor_width: number;
  sensor_height: number;
  min_event_threshold: number;
  annotation_file: string;
  revision: number;
}

export interface Annotation {
  frame_index: number;
  t_start_us: number;
  event_count: number;
  center_x: number | null;
  center_y: number | null;
  saccade_state: string;
  blink_state: string;
  source: string;
  reviewed: boolean;
  revision?: number;
}

export interface DeltaEntry {
  id: string;
  frame_index_prev: number;
  frame_index_next: number;
  dx: number;
  dy: number;
  gap_frames: number;
}

export interface Anomaly extends DeltaEntry {
  dismissed: boolean;
}

export interface AnomalyReport {
  threshold_px: number;
  anomalies: Anomaly[];
}

// Patch body for PUT /annotations/{i}. Only fields the reviewer touched
// are sent; the revision token guards against concurrent edits.
export interface AnnotationPatch {
  revision: number;
  center?: [number, number] | null;
  saccade_state?: string;
  blink_state?: string;
}

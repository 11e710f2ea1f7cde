import { OrbitState, applyDrag, applyZoom } from "./camera";

export interface DragEvents {
  onCameraChange: (state: OrbitState) => void;
  onDragEnd: (state: OrbitState) => void;
}

/** Pointer drag state machine. Camera updates continuously during the drag;
 * the reselection hook fires exactly once, when the drag ends. */
export class DragTracker {
  private dragging = false;
  private lastX = 0;
  private lastY = 0;

  constructor(
    private state: OrbitState,
    private events: DragEvents,
  ) {}

  get camera(): OrbitState {
    return this.state;
  }

  pointerDown(x: number, y: number): void {
    this.dragging = true;
    this.lastX = x;
    this.lastY = y;
  }

  pointerMove(x: number, y: number): void {
    if (!this.dragging) {
      return;
    }
    this.state = applyDrag(this.state, x - this.lastX, y - this.lastY);
    this.lastX = x;
    this.lastY = y;
    this.events.onCameraChange(this.state);
  }

  pointerUp(): void {
    if (!this.dragging) {
      return;
    }
    this.dragging = false;
    this.events.onDragEnd(this.state);
  }

  wheel(delta: number): void {
    this.state = applyZoom(this.state, delta);
    this.events.onCameraChange(this.state);
    this.events.onDragEnd(this.state);
  }
}

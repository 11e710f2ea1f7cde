import { ApiClient, ServerError } from "./api";
import { cameraEquals, cameraMoved } from "./camera";
import { CameraJson, SelectOptions, SelectionJson } from "./types";

export interface SelectionEvents {
  onApply: (selection: SelectionJson, camera: CameraJson) => void;
  onError?: (err: unknown) => void;
}

export const DEFAULT_OPTIONS: SelectOptions = {
  k: 10,
  guarantee_critical: false,
  density_control: false,
  cell_stride: 1,
  mode: "per-segment",
};

/** Drives reselection. Each request carries a sequence number; a response is
 * applied only if no newer request has been issued since, so rapid camera
 * changes converge on the latest view and the displayed selection always
 * matches the last acknowledged response. */
export class SelectionController {
  private seq = 0;
  private applied = 0;
  private lastCamera: CameraJson | null = null;
  private lastSelection: SelectionJson | null = null;
  requestCount = 0;

  constructor(
    private client: ApiClient,
    private sessionId: string,
    private events: SelectionEvents,
    public options: SelectOptions = { ...DEFAULT_OPTIONS },
  ) {}

  get selection(): SelectionJson | null {
    return this.lastSelection;
  }

  /** Called on drag end. Skips the request when the camera has not moved
   * beyond epsilon since the last applied selection. */
  async dragEnded(camera: CameraJson): Promise<boolean> {
    if (this.lastCamera !== null && !cameraMoved(this.lastCamera, camera)) {
      return false;
    }
    await this.requestSelection(camera);
    return true;
  }

  /** Unconditional reselection (option changes, new isosurface, ...). */
  async requestSelection(camera: CameraJson): Promise<void> {
    const mySeq = ++this.seq;
    this.requestCount += 1;
    let result: SelectionJson;
    try {
      result = await this.client.select(this.sessionId, camera, this.options);
    } catch (err) {
      if (mySeq === this.seq) {
        this.events.onError?.(err);
      }
      return;
    }
    if (mySeq <= this.applied || mySeq < this.seq) {
      return; // superseded by a newer request
    }
    if (result.camera !== null && !cameraEquals(result.camera, camera)) {
      this.events.onError?.(
        new ServerError(0, "camera mismatch", "server echoed a different camera"),
      );
      return;
    }
    this.applied = mySeq;
    this.lastCamera = camera;
    this.lastSelection = result;
    this.events.onApply(result, camera);
  }
}

import { describe, expect, it } from "vitest";
import { ApiClient, FetchLike } from "../src/api";
import { toCameraJson } from "../src/camera";
import { SelectionController } from "../src/selection";
import { CameraJson, SelectionJson } from "../src/types";

function cam(azimuth: number): CameraJson {
  return toCameraJson({
    target: [0.5, 0.5, 0.5],
    distance: 2,
    azimuth,
    elevation: 0.2,
    fovY: 0.9,
    width: 800,
    height: 600,
  });
}

interface MockCall {
  body: { camera: CameraJson };
  resolve: () => void;
}

/** Mock server whose responses can be released out of order. Echoes the
 * request camera and tags the response with a label so tests can tell which
 * response was applied. */
function mockServer() {
  const calls: MockCall[] = [];
  const fetchFn: FetchLike = (_url, init) => {
    const body = JSON.parse(String(init?.body));
    return new Promise((resolve) => {
      calls.push({
        body,
        resolve: () =>
          resolve(
            new Response(
              JSON.stringify({
                chosen: [
                  {
                    streamline_id: calls.length - 1,
                    E: 0.5,
                    from_critical: null,
                    reason: "entropy",
                  },
                ],
                rejected_density: [],
                camera: body.camera,
              } satisfies SelectionJson),
              { status: 200 },
            ),
          ),
      });
    });
  };
  return { calls, client: new ApiClient("http://mock", fetchFn) };
}

function controller(client: ApiClient) {
  const applied: SelectionJson[] = [];
  const errors: unknown[] = [];
  const ctl = new SelectionController(client, "s1", {
    onApply: (sel) => applied.push(sel),
    onError: (e) => errors.push(e),
  });
  return { ctl, applied, errors };
}

describe("selection controller", () => {
  it("one drag end issues exactly one request and applies it", async () => {
    const { calls, client } = mockServer();
    const { ctl, applied } = controller(client);
    const p = ctl.dragEnded(cam(0.4));
    expect(calls).toHaveLength(1);
    calls[0].resolve();
    await p;
    expect(ctl.requestCount).toBe(1);
    expect(applied).toHaveLength(1);
    expect(applied[0].chosen[0].streamline_id).toBe(0);
  });

  it("sub-epsilon camera change suppresses the request", async () => {
    const { calls, client } = mockServer();
    const { ctl } = controller(client);
    const p = ctl.dragEnded(cam(0.4));
    calls[0].resolve();
    await p;
    const again = await ctl.dragEnded(cam(0.4));
    expect(again).toBe(false);
    expect(ctl.requestCount).toBe(1);
  });

  it("rapid drags apply only the newest response", async () => {
    const { calls, client } = mockServer();
    const { ctl, applied } = controller(client);
    const p1 = ctl.dragEnded(cam(0.3));
    const p2 = ctl.dragEnded(cam(1.1));
    expect(calls).toHaveLength(2);
    // release in reverse order: the stale response arrives last
    calls[1].resolve();
    await p2;
    calls[0].resolve();
    await p1;
    expect(applied).toHaveLength(1);
    expect(applied[0].camera).toEqual(cam(1.1));
    expect(ctl.selection).toBe(applied[0]);
  });

  it("newest response wins regardless of arrival order", async () => {
    const { calls, client } = mockServer();
    const { ctl, applied } = controller(client);
    const p1 = ctl.dragEnded(cam(0.3));
    const p2 = ctl.dragEnded(cam(1.1));
    calls[0].resolve(); // stale arrives first
    await p1;
    calls[1].resolve();
    await p2;
    expect(applied).toHaveLength(1);
    expect(applied[0].camera).toEqual(cam(1.1));
  });

  it("server error keeps the previous selection", async () => {
    let fail = false;
    const fetchFn: FetchLike = (_url, init) => {
      if (fail) {
        return Promise.resolve(
          new Response(JSON.stringify({ error: "boom", detail: "x" }), {
            status: 500,
          }),
        );
      }
      const body = JSON.parse(String(init?.body));
      return Promise.resolve(
        new Response(
          JSON.stringify({ chosen: [], rejected_density: [], camera: body.camera }),
          { status: 200 },
        ),
      );
    };
    const { ctl, applied, errors } = controller(new ApiClient("http://mock", fetchFn));
    await ctl.dragEnded(cam(0.2));
    expect(applied).toHaveLength(1);
    fail = true;
    await ctl.dragEnded(cam(0.9));
    expect(errors).toHaveLength(1);
    expect(ctl.selection).toBe(applied[0]);
  });

  it("rejects a response whose echoed camera differs", async () => {
    const fetchFn: FetchLike = () =>
      Promise.resolve(
        new Response(
          JSON.stringify({ chosen: [], rejected_density: [], camera: cam(2.9) }),
          { status: 200 },
        ),
      );
    const { ctl, applied, errors } = controller(new ApiClient("http://mock", fetchFn));
    await ctl.dragEnded(cam(0.2));
    expect(applied).toHaveLength(0);
    expect(errors).toHaveLength(1);
  });
});

import type { ClassifyRequest, ClassifyResponse } from "./types.js";

export async function classify(
  serviceUrl: string,
  request: ClassifyRequest,
  signal?: AbortSignal
): Promise<ClassifyResponse> {
  const response = await fetch(`${serviceUrl}/classify`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
    signal,
  });
  if (!response.ok) {
    throw new Error(`classify failed: HTTP ${response.status}`);
  }
  return (await response.json()) as ClassifyResponse;
}

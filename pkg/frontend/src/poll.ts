/**
 * Fixed-interval polling; there is no push channel. Errors are swallowed so
 * a flaky network never kills the loop, and the returned function stops it.
 */
export function startPolling(fn: () => Promise<void>, intervalMs: number): () => void {
  let active = true;

  const tick = async () => {
    if (!active) return;
    try {
      await fn();
    } catch {
      // keep polling; the next tick may succeed
    }
    if (active) setTimeout(tick, intervalMs);
  };

  setTimeout(tick, intervalMs);
  return () => {
    active = false;
  };
}

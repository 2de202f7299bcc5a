/**
 * The client-side context store: string keys to string values, filled by
 * `context` actions and consumed by `call` operands.  Writing an existing
 * key replaces the previous input; the store is cleared after every
 * successful round-trip.
 */
export class ClientContext {
  private entries = new Map<string, string>();

  set(key: string, value: string): void {
    this.entries.set(key, value);
  }

  get(key: string): string | undefined {
    return this.entries.get(key);
  }

  has(key: string): boolean {
    return this.entries.has(key);
  }

  clear(): void {
    this.entries.clear();
  }

  get size(): number {
    return this.entries.size;
  }

  /** Snapshot in the shape the operation endpoint expects. */
  toList(): { key: string; value: string }[] {
    return [...this.entries].map(([key, value]) => ({ key, value }));
  }
}

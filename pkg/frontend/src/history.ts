/** Session query history with shell-style arrow-key recall. */

export class QueryHistory {
  // Append-only within a session; recall never mutates entries.
  private readonly entries: string[] = [];
  private cursor = -1; // -1 = the live (not yet submitted) row
  private draft = '';

  get all(): readonly string[] {
    return this.entries;
  }

  get size(): number {
    return this.entries.length;
  }

  push(query: string): void {
    this.entries.push(query);
    this.cursor = -1;
    this.draft = '';
  }

  /**
   * Up arrow: step towards older entries. The first step stashes the
   * editor's current text so stepping all the way back restores it.
   */
  recallBack(current: string): string | null {
    if (this.entries.length === 0) return null;
    if (this.cursor === -1) {
      this.draft = current;
      this.cursor = this.entries.length - 1;
    } else if (this.cursor > 0) {
      this.cursor -= 1;
    }
    return this.entries[this.cursor] ?? null;
  }

  /** Down arrow: step towards newer entries, ending at the stashed draft. */
  recallForward(): string | null {
    if (this.cursor === -1) return null;
    this.cursor += 1;
    if (this.cursor >= this.entries.length) {
      this.cursor = -1;
      return this.draft;
    }
    return this.entries[this.cursor] ?? null;
  }
}

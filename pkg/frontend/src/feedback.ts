import { postFeedback } from "./api.js";

// Client-side guards around the feedback endpoint: a star or library add
// fires at most once per document per session, and each node click fires
// exactly one click event. Failures are logged, never retried (the
// counters server-side are cheap and the user should not see errors for
// background telemetry).

export class FeedbackGuard {
  readonly starred = new Set<string>();
  readonly shelved = new Set<string>();

  constructor(private readonly user: string) {}

  star(docId: string): boolean {
    if (this.starred.has(docId)) return false;
    this.starred.add(docId);
    void postFeedback(this.user, "star", docId).catch(() => {
      // optimistic toggle stays; the next build simply misses one star
    });
    return true;
  }

  libraryAdd(docId: string): boolean {
    if (this.shelved.has(docId)) return false;
    this.shelved.add(docId);
    void postFeedback(this.user, "library_add", docId).catch(() => {});
    return true;
  }

  click(docId: string): void {
    void postFeedback(this.user, "click", docId).catch(() => {});
  }
}

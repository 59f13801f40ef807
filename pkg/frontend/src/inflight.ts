/**
 * Single-in-flight gate for query submissions.
 *
 * At most one task runs at a time. Submissions that arrive while one is
 * running are queued with a one-slot queue: a newer submission replaces the
 * waiting one, so only the latest queued task ever runs.
 */

export type Outcome = 'ran' | 'superseded';

type Task = () => Promise<void>;

interface Waiting {
  task: Task;
  resolve: (outcome: Outcome) => void;
  reject: (err: unknown) => void;
}

export class SubmissionGate {
  private running = false;
  private waiting: Waiting | null = null;

  get busy(): boolean {
    return this.running;
  }

  submit(task: Task): Promise<Outcome> {
    return new Promise<Outcome>((resolve, reject) => {
      if (this.running) {
        this.waiting?.resolve('superseded');
        this.waiting = { task, resolve, reject };
        return;
      }
      this.running = true;
      void this.run({ task, resolve, reject });
    });
  }

  private async run(current: Waiting): Promise<void> {
    try {
      await current.task();
      current.resolve('ran');
    } catch (err) {
      current.reject(err);
    }
    const next = this.waiting;
    this.waiting = null;
    if (next) {
      void this.run(next);
    } else {
      this.running = false;
    }
  }
}

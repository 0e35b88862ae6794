import { ApiClient } from "./api.js";
import { ConsoleStore } from "./store.js";
import { EventStream } from "./stream.js";
import { render } from "./ui.js";

const root = document.getElementById("root");
if (!root) throw new Error("missing #root element");

const store = new ConsoleStore(new ApiClient());
store.subscribe(() => render(store, root));

const stream = new EventStream("", (event) => store.applyEvent(event));
window.addEventListener("beforeunload", () => stream.stop());

void store.openSession().then(() => {
  void stream.run(store.state.eventCursor);
});
render(store, root);

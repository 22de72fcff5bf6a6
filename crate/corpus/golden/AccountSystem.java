public class AccountSystem {

    //@ public ghost AccountSystem temp;

    /*@ public normal_behavior
      @ requires i >= 0;
      @ ensures (\forall int j; ((getAcc(i) != null) && (i != j)) ==> (getAcc(i) != getAcc(j)));
      @*/
    public /*@ pure @*/ Account getAcc(int i) {
        // TODO: implement
        return null;
    }

    //@ requires this.getAcc(id) != null;
    //@ ensures \result == this.getAcc(id).balance();
    public /*@ pure @*/ int getBalance(int id) {
        // TODO: implement
        return 0;
    }

    //@ ensures (\forall int i; this.getAcc(i) == null);
    public AccountSystem() {
        // TODO: implement
    }

    //@ ensures (\forall int i; this.getAcc(i).equals(another.getAcc(i))) ==> (\result == true);
    public boolean equals(AccountSystem another) {
        // TODO: implement
        return false;
    }

    //@ requires another != null;
    //@ ensures this != another;
    //@ ensures (\forall int i; (this.getAcc(i) != null) ==> (this.getAcc(i).equals(another.getAcc(i)) && (this.getAcc(i) != another.getAcc(i)) && (this.getBalance(i) == another.getBalance(i))));
    public AccountSystem(AccountSystem another) {
        // TODO: implement
    }

    //@ requires (this.getAcc(id) == null) && (n >= 0);
    //@ ensures \result.getAcc(id).equals(new Account().add(n)) && (\forall int j; (j != id) ==> (\result.getAcc(id) != \result.getAcc(j))) && (\result == this);
    public AccountSystem add(int id, int n) {
        //@ set temp = new AccountSystem(this);
        // TODO: implement
        return this;
    }

    //@ requires this.getAcc(id) != null;
    //@ ensures (\result.getAcc(id) == null) && (\result == this);
    public AccountSystem del(int id) {
        //@ set temp = new AccountSystem(this);
        // TODO: implement
        return this;
    }

    //@ requires (this.getAcc(id) != null) && (n >= 0);
    //@ ensures \result.getAcc(id).equals(temp.getAcc(id).add(n)) && (\result == this);
    public AccountSystem deposit(int id, int n) {
        //@ set temp = new AccountSystem(this);
        // TODO: implement
        return this;
    }

    //@ requires (this.getAcc(id) != null) && (n >= 0);
    //@ ensures \result.getAcc(id).equals(temp.getAcc(id).add(-n)) && (\result == this);
    public AccountSystem withdraw(int id, int n) {
        //@ set temp = new AccountSystem(this);
        // TODO: implement
        return this;
    }
}
